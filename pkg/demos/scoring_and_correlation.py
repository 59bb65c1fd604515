# %% [markdown]
# # Scoring systems and correlating the scores
#
# Precision is over extractions, recall over clusters.  A cluster is counted
# once however many extractions hit it.

# %%
import numpy as np

from oie_eval import MatcherConfig, match_corpus, parse_extractions, parse_gold, pearson, score_corpus
from oie_eval.scorer import extraction_length_stats

gold = parse_gold("""\
sent_id:s1\tAnna lived in Paris and is Canadian .
1 --> Anna --> lived in --> Paris
2 --> Anna --> is --> Canadian

sent_id:s2\tBob owns the label .
1 --> Bob --> owns --> [the] label

sent_id:s3\tCarl founded a company .
1 --> Carl --> founded --> [a] company
""")

system = parse_extractions("""\
s1\tAnna\tlived in\tParis
s1\tAnna\tlived in\tParis
s2\tBob\towns\tlabel
s2\tBob\towns\tthe label
s3\tCarl\tate\tsoup
s1\tAnna\tsaid\tnothing
""", system_name="demo")

# %%
decisions = match_corpus(system, gold)
report = score_corpus(decisions, gold, system)
print(f"P={report.precision:.4f} R={report.recall:.4f} F1={report.f1:.4f}")
print("mean extraction length:", extraction_length_stats(system))

# %% [markdown]
# The same system under each matcher variant.

# %%
for name in MatcherConfig.VARIANTS:
    rep = score_corpus(match_corpus(system, gold, MatcherConfig.from_name(name)), gold, system)
    print(f"{name:16} matched {rep.matched_extractions}/{rep.total_extractions}")

# %% [markdown]
# Correlating benchmark scores with a downstream task.  The numbers below
# are made up for illustration.

# %%
bench = np.array([0.21, 0.35, 0.12, 0.28, 0.40])
task = np.array([0.30, 0.41, 0.15, 0.33, 0.52])
print("pearson:", round(pearson(bench, task), 4))
print("numpy  :", round(np.corrcoef(bench, task)[0, 1], 4))
