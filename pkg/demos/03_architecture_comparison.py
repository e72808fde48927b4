# %% [markdown]
# # Baseline vs single-agent vs multi-agent
#
# The same deterministic backend drives three architectures: a tool-less
# baseline, one agent holding all five tools, and the full specialist
# team. All three emit schema-identical cohort reports, so the comparison
# is a table diff.

# %%
from molforge.metrics import render_report_text
from molforge.orchestrator.engine import CampaignConfig, run_architecture
from molforge.orchestrator.policy import PolicyBackend

SEED = 41
results = {}
for mode in ("baseline", "single-agent", "mas"):
    results[mode] = run_architecture(CampaignConfig(mode=mode, seed=SEED), PolicyBackend(seed=SEED))
    print(f"{mode:<13} tool calls: {len(results[mode].registry.records):>3}   "
          f"finalists: {len(results[mode].finalists)}")

# %% [markdown]
# ## Side-by-side key metrics
# The baseline proposes from prior knowledge alone (its docking column is
# evaluation-time scoring); the agentic modes optimized against live mock
# docking feedback.

# %%
rows = [
    ("attempted", lambda r: r["generation_quality"]["attempted"]),
    ("validity", lambda r: r["generation_quality"]["validity"]),
    ("uniqueness", lambda r: r["generation_quality"]["uniqueness"]),
    ("internal diversity", lambda r: r["generation_quality"]["internal_diversity"][0]),
    ("qed mean", lambda r: r["drug_likeness"]["qed_mean_sd"][0]),
    ("docking mean", lambda r: r["target_specific"]["docking_mean_sd"][0]),
    ("hit rate %", lambda r: r["target_specific"]["hit_rate_pct"]),
]
header = f"{'metric':<20}" + "".join(f"{m:>14}" for m in results)
print(header)
print("-" * len(header))
for label, getter in rows:
    values = []
    for mode in results:
        value = getter(results[mode].report)
        values.append(f"{value:>14.3f}" if isinstance(value, float) else f"{value:>14}")
    print(f"{label:<20}" + "".join(values))

# %% [markdown]
# ## Full report for the multi-agent run

# %%
print(render_report_text(results["mas"].report))
