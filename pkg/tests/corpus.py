"""Session-type corpus shared by the DSL tests and the acceptance suite.

Every entry is a closed ``rec`` type whose compact count at rank 4 stays small
enough for the substitution, unfolding and embedding checks to run exhaustively.
"""
CORPUS = [
    "rec a. +{ b0: a, b1: a, eps: 1 }",
    "rec a. &{ query: +{ yes: a, no: a }, quit: 1 }",
    "rec a. +{ z: 1, s: a }",
    "rec a. a",
    "rec a. +{ m: &{ n: a }, done: 1 }",
    "rec a. +{ stop: 1, go: rec b. &{ ping: a, quit: 1 } }",
    "rec a. rec b. +{ l: a, e: 1 }",
    "rec a. &{ x: rec b. +{ z: a, w: 1 } }",
    "rec a. +{ done: 1, more: rec b. &{ up: a, stay: +{ t: 1 } } }",
    "rec a. rec b. &{ l: a, r: 1 }",
]
