"""Provenance store: recording, lineage, validation, persistence."""

import random

import pytest

from molforge.provenance import ProvenanceError, ProvenanceStore
from tests.corpus_util import load_corpus


def seeded_store():
    store = ProvenanceStore()
    _, [root] = store.record("AIExpert", "seed", [], ["CCO"], cycle=1)
    return store, root


def test_one_level_ancestry():
    store, root = seeded_store()
    _, children = store.record(
        "MedicinalChemist", "modification", [root], ["CCN", "CCC"], cycle=1
    )
    assert store.lineage(children[0]) == [root]
    assert store.lineage(children[1]) == [root]


def test_two_step_chain_with_properties():
    # de novo -> first edit -> second edit, docking improving at the end.
    store = ProvenanceStore()
    _, [de_novo] = store.record(
        "AIExpert", "seed", [], ["CCOc1ccccc1"],
        properties=[{"docking": -10.42, "qed": 0.659, "sa": 3.25}], cycle=1,
    )
    _, [mod1] = store.record(
        "MedicinalChemist", "modification", [de_novo], ["CCOc1ccccc1C"],
        properties=[{"docking": -9.32, "qed": 0.773, "sa": 2.67}], cycle=1,
    )
    _, [mod2] = store.record(
        "MedicinalChemist", "modification", [mod1], ["CCOc1ccccc1CN1CCOCC1"],
        properties=[{"docking": -11.09, "qed": 0.629, "sa": 2.80}], cycle=2,
    )
    assert store.lineage(mod2) == [mod1, de_novo]
    assert store.nodes[mod2].properties["docking"] == -11.09


def test_record_with_unknown_input_leaves_store_unchanged():
    store, root = seeded_store()
    before = store.export_json()
    with pytest.raises(ProvenanceError):
        store.record("MedicinalChemist", "modification", ["missing"], ["CCC"])
    assert store.export_json() == before


def test_record_with_invalid_smiles_leaves_store_unchanged():
    store, root = seeded_store()
    before = store.export_json()
    with pytest.raises(ProvenanceError):
        store.record("MedicinalChemist", "modification", [root], ["C1CC"])
    assert store.export_json() == before


def test_seed_lineage_empty():
    store, root = seeded_store()
    assert store.lineage(root) == []


def test_lineage_unknown_node():
    store, _ = seeded_store()
    with pytest.raises(ProvenanceError):
        store.lineage("nope")


def test_duplicate_smiles_flagged_revisit():
    store, root = seeded_store()
    _, [dup] = store.record("MedicinalChemist", "modification", [root], ["OCC"])
    assert store.nodes[dup].revisit  # same canonical form as the seed


def test_descendants_leaf_empty():
    store, root = seeded_store()
    _, [child] = store.record("MedicinalChemist", "modification", [root], ["CCN"])
    assert store.descendants(child) == set()


def test_descendants_binary_two_levels():
    store = ProvenanceStore()
    _, [root] = store.record("AIExpert", "seed", [], ["CCO"])
    _, level1 = store.record("MedicinalChemist", "modification", [root], ["CCN", "CCC"])
    grandchildren = []
    for node in level1:
        _, out = store.record(
            "MedicinalChemist", "modification", [node], ["CCCC", "CCCCC"]
        )
        grandchildren.extend(out)
    assert store.descendants(root) == set(level1) | set(grandchildren)
    assert len(store.descendants(root)) == 6


def test_descendants_matches_bruteforce_on_random_store():
    store, ids = random_store(seed=9, edges=50)
    # Brute-force reachability over the oriented hyperedges.
    def brute(node_id):
        reached, frontier = set(), {node_id}
        while frontier:
            nxt = set()
            for edge in store.edges.values():
                if frontier & set(edge.inputs):
                    for out in edge.outputs:
                        if out not in reached:
                            nxt.add(out)
            reached |= nxt
            frontier = nxt
        return reached

    rng = random.Random(1)
    for node_id in rng.sample(ids, 10):
        assert store.descendants(node_id) == brute(node_id)


def test_lineage_matches_bruteforce_on_random_store():
    store, ids = random_store(seed=5, edges=50)

    def brute(node_id):
        chain = []
        current = node_id
        while True:
            edge = store.edges[store.nodes[current].created_by]
            if not edge.inputs:
                return chain
            parent = edge.inputs[0]
            chain.append(parent)
            current = parent

    for node_id in ids[::7]:
        assert store.lineage(node_id) == brute(node_id)


def random_store(seed: int, edges: int):
    rng = random.Random(seed)
    corpus = load_corpus()
    store = ProvenanceStore()
    ids: list[str] = []
    agents = ["AIExpert", "MedicinalChemist", "Database", "Ranking"]
    for k in range(edges):
        if not ids or rng.random() < 0.25:
            kind = "seed" if rng.random() < 0.7 else "database-import"
            agent = "AIExpert" if kind == "seed" else "Database"
            _, out = store.record(
                agent, kind, [], [rng.choice(corpus)], cycle=rng.randint(1, 3)
            )
        else:
            inputs = rng.sample(ids, min(len(ids), rng.randint(1, 2)))
            n_out = rng.randint(1, 3)
            _, out = store.record(
                rng.choice(agents[:2]),
                "modification",
                inputs,
                [rng.choice(corpus) for _ in range(n_out)],
                cycle=rng.randint(1, 3),
            )
        ids.extend(out)
    return store, ids


def test_validate_fresh_store_clean():
    store, _ = random_store(seed=2, edges=40)
    assert store.validate() == []


def test_validate_detects_corrupted_parent():
    store, root = seeded_store()
    _, [a] = store.record("MedicinalChemist", "modification", [root], ["CCN"])
    _, [b] = store.record("AIExpert", "seed", [], ["CCCC"])
    store.nodes[a].parent = b  # not an input of a's creating edge
    violations = store.validate()
    assert [v for v in violations if v.startswith("parent-not-in-edge-inputs")]
    assert len(violations) == 1


def test_validate_detects_cycle_in_deserialized_file():
    store, root = seeded_store()
    _, [child] = store.record("MedicinalChemist", "modification", [root], ["CCN"])
    blob = store.export_json()
    clone = ProvenanceStore.import_json(blob)
    # Hand-corrupt: make the seed edge consume the child, closing a loop.
    seed_edge = clone.nodes[root].created_by
    clone.edges[seed_edge].inputs.append(child)
    assert "cycle" in clone.validate()


def test_seq_is_gapless_total_order():
    store, _ = random_store(seed=3, edges=25)
    seqs = [store.edges[eid].seq for eid in store.temporal_chain]
    assert seqs == list(range(1, 26))


def test_acyclic_after_random_record_sequences():
    for seed in range(5):
        store, _ = random_store(seed=seed, edges=30)
        assert "cycle" not in store.validate()


def test_export_import_roundtrip_lossless():
    store, _ = random_store(seed=11, edges=100)
    clone = ProvenanceStore.import_json(store.export_json())
    assert store.structurally_equal(clone)
    assert clone.validate() == []


def test_export_empty_store():
    store = ProvenanceStore()
    clone = ProvenanceStore.import_json(store.export_json())
    assert clone.structurally_equal(store)


def test_truncated_file_rejected_without_partial_store():
    store, _ = random_store(seed=4, edges=10)
    blob = store.export_json()[:-40]
    with pytest.raises(ProvenanceError):
        ProvenanceStore.import_json(blob)


def test_schema_version_mismatch_rejected():
    with pytest.raises(ProvenanceError):
        ProvenanceStore.import_json('{"schema": "provenance/99", "nodes": []}')


def test_node_id_format():
    store, root = seeded_store()
    assert root.startswith("AI:1:")
    _, [child] = store.record("MedicinalChemist", "modification", [root], ["CCN"], cycle=2)
    assert child.startswith("MC:2:")


def test_ranking_annotation_edge_kind():
    store, root = seeded_store()
    edge_id, [note] = store.record(
        "Ranking", "ranking-annotation", [root], ["CCO"], rationale="rank 1", cycle=3
    )
    assert store.edges[edge_id].kind == "ranking-annotation"
    assert store.nodes[note].revisit
    assert store.validate() == []


def test_arbitrary_agent_names_accepted():
    store = ProvenanceStore()
    _, [node] = store.record("Literature", "database-import", [], ["CCO"])
    assert node.startswith("LITE:")
