"""Recursive domain equations over finite pointed posets, solved exactly on compact elements."""
from .terms import BOT, Atom, Bot, Compact, Tag, Tup, render, parse_element
from .poset import (Poset, DomMap, EPPair, singleton, chain, flat, labelled_sum, product,
                    projection_of, enumerate_strict_monotone_maps, iso_check)
from .functor import (FunctorExpr, Const, Arg, Sum, Prod, Compose, Dagger, NatTrans,
                      apply_obj, apply_mor, render_functor)
from .chain import Link, LinkMor, omega, omega_mor, bottom_link
from .bilimit import Bilimit, inject, project_to, mediating, gfix, unf, fold, unfold
from .fixpoint import fix, dagger_obj, dagger_mor, dagger_nat, Algebra, initial_mediating, bekic_solve

__version__ = "0.1.0"
