"""scottkit: back-and-forth Scott analysis of finite structures,
infinitary formulas, Kleene-Brouwer orders and a linear-order term calculus."""

from .structures import (Signature, Structure, StructureError, StructureSyntaxError, all_digraphs,
                         atomic_type, atoms, brute_force_iso, cycle, digraph, edgeless,
                         injective_tuples, linear_order, load_structure, parse_structure,
                         random_structure, relabel, serialize_structure)
from .backforth import BFTable, RankReport, bf_equiv, bf_table, rho, scott_rank, support
from .formulas import (DEFAULT_POOL, Atom, Conj, Disj, Equal, Evaluator, Exists, Forall, Formula,
                       FormulaError, FormulaPool, Implies, Not, UnassignedVariable, evaluate,
                       from_json, from_sexpr, qr, satisfaction, to_json, to_sexpr)
from .scott import atom_literals, css, mod_check, phi_formula
from .terms import (ONE_PLUS_ETA, Eta, Fin, Omega, OrderTerm, Prod, Sum, TermError,
                    TermSyntaxError, UnsupportedFactor, is_ordinal_term, omega_power, parse_term,
                    term_text)
from .eftypes import N_MAX, EFError, EFType, TypeSpace, ef_equiv, ef_type, game_solver
from .normal import NormalForm, Verdict, harrison, normalize, term_equal
from .kb import (FiniteTree, TreeError, classify_pipeline, kb_as_structure, kb_compare, kb_order,
                 load_tree, parse_tree, random_tree, serialize_tree)

__version__ = "0.1.0"
