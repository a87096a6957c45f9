"""Small reference machines used by the test suite and the bundled demos."""

from functools import lru_cache

from .machine import parse_machine

# Exactly synchronizable two-state machine: 'b' merges both states into
# state 0 after one step.
M_EX_TEXT = """\
machine M_EX
states 0 1
symbols a b
edge 0 a 0 0.5
edge 0 b 1 0.5
edge 1 a 0 0.75
edge 1 b 0 0.25
end
"""

# Non-exact two-state machine: every letter permutes the state set, so the
# pair (0, 1) never merges and an observer only synchronizes asymptotically.
M_NE_TEXT = """\
machine M_NE
states 0 1
symbols a b
edge 0 a 0 0.7
edge 0 b 1 0.3
edge 1 a 1 0.4
edge 1 b 0 0.6
end
"""

# Golden-mean machine: 'b' is forbidden from state 1; seeing 'b' reveals the
# state, so the machine is exact.
M_GM_TEXT = """\
machine M_GM
states 0 1
symbols a b
edge 0 a 0 0.5
edge 0 b 1 0.5
edge 1 a 0 1.0
end
"""

# One-state machine; the observer knows the state before reading anything.
M_1_TEXT = """\
machine M_1
states 0
symbols a
edge 0 a 0 1.0
end
"""


@lru_cache(maxsize=None)
def m_ex():
    return parse_machine(M_EX_TEXT)


@lru_cache(maxsize=None)
def m_ne():
    return parse_machine(M_NE_TEXT)


@lru_cache(maxsize=None)
def m_gm():
    return parse_machine(M_GM_TEXT)


@lru_cache(maxsize=None)
def m_1():
    return parse_machine(M_1_TEXT)
