# %% [markdown]
# # Chemistry substrate walkthrough
#
# Parse SMILES, canonicalize, fingerprint and compute descriptors with the
# pure-Python chemistry core. Everything here is deterministic and offline.

# %%
from molforge.chem import (
    canonicalize,
    compute_descriptors,
    lipinski_pass,
    morgan_fingerprint,
    parse_smiles,
    tanimoto,
)

# %% [markdown]
# ## Parsing and canonical forms
# The same molecule written three ways lands on one canonical string.

# %%
for text in ("c1ccccc1", "C1=CC=CC=C1", "c1ccc(cc1)"):
    print(f"{text:>14} -> {canonicalize(parse_smiles(text))}")

# %%
aspirin = parse_smiles("CC(=O)Oc1ccccc1C(=O)O")
print("heavy atoms:", aspirin.heavy_atom_count())
print("aromatic atoms:", sum(a.aromatic for a in aspirin.atoms))

# %% [markdown]
# ## Descriptors
# Weight, lipophilicity, polarity, drug-likeness and synthetic
# accessibility for a few familiar structures.

# %%
for name, smiles in [
    ("aspirin", "CC(=O)Oc1ccccc1C(=O)O"),
    ("caffeine", "Cn1cnc2c1c(=O)n(C)c(=O)n2C"),
    ("ibuprofen", "CC(C)Cc1ccc(C(C)C(=O)O)cc1"),
]:
    d = compute_descriptors(parse_smiles(smiles))
    print(
        f"{name:<10} MW {d.mol_weight:7.2f}  LogP {d.logp:6.2f}  TPSA {d.tpsa:6.1f}  "
        f"QED {d.qed:.3f}  SA {d.sa_score:.2f}  Ro5 pass: {lipinski_pass(d)}"
    )

# %% [markdown]
# ## Similarity
# Circular fingerprints with Tanimoto similarity; constitutional isomers
# are clearly separated from close analogues.

# %%
pairs = [
    ("ethanol vs dimethyl ether", "CCO", "COC"),
    ("aspirin vs salicylic acid", "CC(=O)Oc1ccccc1C(=O)O", "O=C(O)c1ccccc1O"),
    ("benzene vs benzene", "c1ccccc1", "c1ccccc1"),
]
for label, a, b in pairs:
    fa = morgan_fingerprint(parse_smiles(a))
    fb = morgan_fingerprint(parse_smiles(b))
    print(f"{label:<28} tanimoto = {tanimoto(fa, fb):.3f}")
