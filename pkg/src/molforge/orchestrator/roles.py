"""Agent roles, personas and the per-mode cycle schedule."""

from __future__ import annotations

from dataclasses import dataclass

ROLES = (
    "PrincipalResearcher",
    "Database",
    "AIExpert",
    "MedicinalChemist",
    "Ranking",
    "ScientificCritic",
)

# Persona prompts follow the title / expertise / goal / role four-field
# convention used throughout the agent definitions.
PERSONAS = {
    "PrincipalResearcher": (
        "Title: Principal Researcher. Expertise: strategy for structure-based "
        "small-molecule optimization campaigns. Goal: set per-cycle objectives, "
        "synthesize findings, and carry distilled context between cycles. Role: "
        "open each cycle with objectives and close it with a concise summary; "
        "never call tools."
    ),
    "Database": (
        "Title: Data Retrieval Specialist. Expertise: protein and bioactivity "
        "databases. Goal: anchor the project with target sequence, structure and "
        "known ligand data. Role: query the data tools once, in the first cycle, "
        "and report a structured target context."
    ),
    "AIExpert": (
        "Title: Generative Design Expert. Expertise: sequence-conditioned de novo "
        "molecule generation. Goal: seed the campaign with novel, plausible "
        "scaffolds. Role: invoke the generative workflow in cycle one and publish "
        "the most promising seeds."
    ),
    "MedicinalChemist": (
        "Title: Medicinal Chemist. Expertise: structure-activity reasoning and "
        "molecule editing. Goal: improve predicted binding while keeping "
        "drug-like properties acceptable. Role: propose modifications, evaluate "
        "them with the docking workflow, and keep only what improves."
    ),
    "Ranking": (
        "Title: Ranking Analyst. Expertise: multi-parameter candidate "
        "prioritization. Goal: order the current pool by the desirability index. "
        "Role: invoke the ranking tool and publish the ordered list."
    ),
    "ScientificCritic": (
        "Title: Scientific Critic. Expertise: methodological review. Goal: expose "
        "logical inconsistencies or unsupported claims. Role: comment on the "
        "cycle's reasoning; no tools, no molecules."
    ),
    "Solo": (
        "Title: Research Generalist. Expertise: end-to-end molecular "
        "optimization. Goal: run the whole campaign single-handedly. Role: "
        "retrieve data, generate, evaluate and rank candidates as one agent."
    ),
}


@dataclass(slots=True, frozen=True)
class CycleSpec:
    index: int
    ordered_roles: tuple[str, ...]
    purpose: str


MAS_SCHEDULE = (
    CycleSpec(
        1,
        ("PrincipalResearcher", "Database", "AIExpert", "MedicinalChemist", "Ranking", "ScientificCritic"),
        "Assemble target context, seed de novo scaffolds, first optimization pass, prioritize, audit.",
    ),
    CycleSpec(
        2,
        ("PrincipalResearcher", "MedicinalChemist", "Ranking", "ScientificCritic"),
        "Refine the best candidates; no new scaffolds enter the pool.",
    ),
    CycleSpec(
        3,
        ("PrincipalResearcher", "MedicinalChemist", "Ranking"),
        "Final polishing pass and closing ranking; the critic is omitted.",
    ),
)

SOLO_SCHEDULE = (
    CycleSpec(1, ("Solo",), "Anchor target data and seed candidates."),
    CycleSpec(2, ("Solo",), "Refine candidates."),
    CycleSpec(3, ("Solo",), "Final polish and selection."),
)


def schedule_for_mode(mode: str) -> tuple[CycleSpec, ...]:
    if mode == "mas":
        return MAS_SCHEDULE
    if mode in ("single-agent", "baseline"):
        return SOLO_SCHEDULE
    raise ValueError(f"unknown mode {mode!r}")
