# %% [markdown]
# # Matching extractions against fact synsets
#
# A gold sentence holds clusters; each cluster lists formulations whose
# `[bracketed]` groups may be dropped.  An extraction is credited to at most
# one cluster.

# %%
from oie_eval import Extraction, MatcherConfig, collect_rewriting_pairs, generate_alternatives, match_extraction, parse_gold
from oie_eval import expand_formulation

gold = parse_gold("""\
sent_id:cg\tChilly Gonzales is a Canadian musician who lived in Paris and Cologne .
1 --> Chilly Gonzales --> lived in --> Paris
2 --> Chilly Gonzales --> lived in --> Cologne
3 --> Chilly Gonzales --> is --> Canadian
4 --> Chilly Gonzales --> is [a] --> musician
""")
g = gold.sentences[0]

# %% [markdown]
# Cluster 4 expands to two concrete triples.

# %%
for t in sorted(expand_formulation(g.cluster(4).formulations[0])):
    print(t)

# %% [markdown]
# Extractions that merge two clusters miss under exact match alone.

# %%
merged = Extraction("cg", "Chilly Gonzales".split(), "is a".split(), "Canadian musician".split())
for name in ("em", "em+af"):
    d = match_extraction(merged, g, MatcherConfig.from_name(name))
    print(f"{name:6} -> cluster {d.matched_cluster} via {d.method.value}")

# %% [markdown]
# The rewriting pairs gathered from the gold, and the alternatives they
# generate for the merged extraction.

# %%
pairs = collect_rewriting_pairs(g)
for p in pairs:
    print(p.source.value, " ".join(p.a), "/", " ".join(p.b), "from cluster", p.source_cluster)
for alt in generate_alternatives(merged, pairs):
    print("  alternative:", " | ".join(" ".join(s) for s in alt.triple))

# %% [markdown]
# Level of detail: an extraction that spells out more than one reference
# formulation is still credited when another cluster backs up the split.

# %%
alex = parse_gold("""\
sent_id:alex\tAlex broadcasts a web series Music on a website .
1 --> Alex --> broadcasts --> [a] web series
2 --> Alex --> broadcasts --> Music
3 --> Alex --> broadcasts Music on --> a website
""").sentences[0]
for arg2 in ("Music on a website", "a web series Music on a website"):
    e = Extraction("alex", ["Alex"], ["broadcasts"], arg2.split())
    d = match_extraction(e, alex)
    print(f"{arg2!r:40} -> {d.matched_cluster} ({d.method.value})")

# %% [markdown]
# Stray quote tokens only match once punctuation is normalized.

# %%
mcw = parse_gold("sent_id:m\tt\n1 --> [`] [`] My Classical Way [''] --> was --> released\n").sentences[0]
e = Extraction("m", "`` My Classical Way ''".split(), ["was"], ["released"])
for name in ("em+af+lod", "em+af+lod+punc"):
    d = match_extraction(e, mcw, MatcherConfig.from_name(name))
    print(name, d.matched_cluster, d.punc_used)
