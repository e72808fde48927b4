# %% [markdown]
# # Anatomy of one research-cycle campaign
#
# Runs a single deterministic campaign (policy backend + mock tools) and
# dissects what came out: speaker schedule, tool usage, provenance and the
# final candidate slate.

# %%
from molforge.orchestrator.engine import CampaignConfig, run_campaign
from molforge.orchestrator.policy import PolicyBackend

SEED = 7
result = run_campaign(CampaignConfig(mode="mas", seed=SEED), PolicyBackend(seed=SEED))

# %% [markdown]
# ## Who spoke when
# Cycle 1 runs the full team; cycle 2 drops the data-retrieval roles;
# cycle 3 omits the critic. The closing entry of each cycle is the
# principal's summary that becomes the next cycle's context.

# %%
for cycle in (1, 2, 3):
    print(cycle, "->", " / ".join(result.transcript.speaker_sequence(cycle)))

# %% [markdown]
# ## Tool usage
# Raw tool payloads stay behind references; the transcript only ever sees
# bounded summaries.

# %%
for record in result.registry.records[:8]:
    print(f"{record.call_id:<9} {record.agent:<17} {record.tool:<22} {record.summary[:60]}")
print(f"... {len(result.registry.records)} calls total")

# %% [markdown]
# ## Provenance
# Every accepted molecule is a node whose single-parent chain ends at a
# de novo seed or a database import.

# %%
store = result.provenance
print("nodes:", len(store.nodes), "edges:", len(store.edges), "violations:", store.validate())
leader = result.finalists[0]
print("top finalist:", leader["node_id"], leader["smiles"])
for ancestor in [leader["node_id"]] + store.lineage(leader["node_id"]):
    node = store.nodes[ancestor]
    print(f"  {ancestor:<10} docking={node.properties.get('docking')} {node.canonical_smiles[:50]}")

# %% [markdown]
# ## The finalists
# Ten candidates, ranked by the desirability index over docking, QED and
# synthetic accessibility.

# %%
for row in result.finalists:
    p = row["properties"]
    print(
        f"rank {row['rank']:>2}  {row['node_id']:<10} docking {p.get('docking'):>7}  "
        f"qed {p.get('qed'):>7}  sa {p.get('sa'):>7}"
    )
