# %% [markdown]
# # Linting a gold corpus
#
# The proxies point at places worth a second look; they do not decide
# whether an annotation is wrong.

# %%
from oie_eval import diff_annotation_sets, parse_gold
from oie_eval.lint import LOOSE, STRICT, lint_corpus, sentence_counts

gold = parse_gold("""\
sent_id:justice\tHe became a founding justice of the High Court of Australia .
1 --> He --> became --> [a] [founding] justice of [the] High Court [of Australia]
2 --> He --> became [a] [founding] justice of --> [the] High Court [of Australia]

sent_id:fraud\tIt deals with cases of fraud in relation to direct taxes and tax credits .
1 --> It --> deals --> with cases of fraud in [relation to] direct taxes
1 --> It --> deals --> with cases of fraud in [relation to] tax credits
""")

# %% [markdown]
# Strict mode compares slot-aligned triples, so the two "justice" clusters
# look different.  Loose mode compares whole linearizations.

# %%
for modes in ((STRICT,), (STRICT, LOOSE)):
    found = lint_corpus(gold, modes)
    print(modes, [(f.kind.value, f.sent_id, f.severity) for f in found])

# %%
findings = lint_corpus(gold)
print(sentence_counts(findings))
for w in findings[0].witnesses:
    print("  ", w)

# %% [markdown]
# Comparing two annotations of the same sentence.  Sentences present in
# only one corpus are skipped with a warning.

# %%
other = parse_gold("""\
sent_id:justice\tHe became a founding justice of the High Court of Australia .
1 --> He --> became --> [a] founding justice
""")
for f in diff_annotation_sets(gold, other):
    print(f.direction, f.sent_id, f.clusters, f.witnesses[0])
