"""Path and parameterized assertions with their rewrite calculus."""

from .assn import (
    FALSE_A,
    INIT,
    TRUE_A,
    Assertion,
    Binder,
    BoolLift,
    CommSpec,
    Conj,
    Disj,
    ExprBinder,
    FalseAssn,
    Init,
    InSpec,
    Interrupt,
    InterruptInf,
    IOSync,
    OutSpec,
    Rec,
    RecVar,
    Subst,
    SyncResidual,
    TrueAssn,
    Wait,
    WaitIn,
    WaitOutv,
    bind,
    bind_expr,
    conj_a,
    disj_a,
    leaf_count,
    subst_atoms,
    subst_rec_var,
    unfold,
    walk,
)
from .path import ID_INV, IdInv, PathAssertion, SolPath, path_map, path_state, sol_path
from .printer import pretty_assertion, pretty_path
from .rewrite import delay_assertion, make_subst, mono_rewrite, normalize, push_subst

__all__ = [
    "FALSE_A",
    "ID_INV",
    "INIT",
    "TRUE_A",
    "Assertion",
    "Binder",
    "BoolLift",
    "CommSpec",
    "Conj",
    "Disj",
    "ExprBinder",
    "FalseAssn",
    "IOSync",
    "IdInv",
    "InSpec",
    "Init",
    "Interrupt",
    "InterruptInf",
    "OutSpec",
    "PathAssertion",
    "Rec",
    "RecVar",
    "SolPath",
    "Subst",
    "SyncResidual",
    "TrueAssn",
    "Wait",
    "WaitIn",
    "WaitOutv",
    "bind",
    "bind_expr",
    "conj_a",
    "delay_assertion",
    "disj_a",
    "leaf_count",
    "make_subst",
    "mono_rewrite",
    "normalize",
    "path_map",
    "path_state",
    "pretty_assertion",
    "pretty_path",
    "push_subst",
    "sol_path",
    "subst_atoms",
    "subst_rec_var",
    "unfold",
    "walk",
]
