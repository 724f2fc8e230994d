"""Frozen reference values.

REFERENCE holds values stated for concrete parameters in the published
analysis of these groups.  ENUMERATED holds orders first obtained with this
package and cross-checked three ways (regular HLT, regular Felsch and the
tracked enumeration over <x>), then frozen here as regression data.
"""

# ---- reference values

TRIVIAL_GROUPS = ["1,2;1,2;1,2", "1,2;2,3;1,2", "2,3;3,4;1,2"]

Q_1213 = {
    "params": "1,2;1,2;1,3",
    "order": 6,
    "derived_series": [6, 3, 1],
    "element_orders": {"x": 1, "y": 3, "z": 2},
    "L": 6,
    "M": 4,
    "ratio": 1,
    "order_exponents": (1, 3, 8),
    "abelian_invariants": (2,),
}

Q3_141414 = {
    "params": "1,4;1,4;1,4",
    "prime": 3,
    "exponents": (81, 81, 81),
    "derived_abelian": False,
    "derived_class": 2,
    "order_exponents": (567, 567, 567),
    "L": 250047,
    "M": 729,
}

KILLER_STRINGS = {
    ("1,2;1,2;1,2", 1, 1, 1): "x^2 = z^-4 y^-1 z^2 y^2",
    ("1,2;1,2;1,3", 1, 1, 1): "x^2 = z^-9 y^-1 z^3 y^2",
}

DECIDE_TABLE = {
    "1,2;1,2;1,2": ("NotDevelopable", None),
    "2,3;2,3;2,4": ("NotDevelopable", None),
    "3,-3;5,-5;7,-7": ("Developable", "SC1"),
    "2,3;1,1;1,1": ("Developable", "SC2"),
    "3,5;1,1;1,-1": ("Developable", "SC3"),
    "1,-1;1,-1;1,-1": ("Developable", "SC1"),
    "2,3;2,3;2,3": ("Unknown", None),
    "3,4;3,4;3,4": ("Unknown", None),
}
REPORTED_INFINITE = {"2,3;2,3;2,3", "3,4;3,4;3,4"}

COPRIME_TABLE = {
    "1,-1;1,-1;1,-1": ("Developable", "CP1"),
    "2,3;1,1;1,1": ("Developable", "CP2"),
    "3,5;1,1;1,-1": ("Developable", "CP3"),
    "2,3;1,1;1,-1": ("NotDevelopable", None),
}

POWER_REDUCTIONS = {
    ("2,4;3,5;1,2", 0, 2): "1,2;3,5;1,4",
    ("6,9;4,9;1,2", 0, 3): "2,3;4,9;1,8",
}

# ---- enumerated orders of Q(1,b;1,d;1,f), b,d,f in {2,3,4}

SWEEP_ORDERS = {
    "1,2;1,2;1,2": 1, "1,2;1,2;1,3": 6, "1,2;1,2;1,4": 21,
    "1,2;1,3;1,2": 6, "1,2;1,3;1,3": 48, "1,2;1,3;1,4": 234,
    "1,2;1,4;1,2": 21, "1,2;1,4;1,3": 210, "1,2;1,4;1,4": 1323,
    "1,3;1,2;1,2": 6, "1,3;1,2;1,3": 48, "1,3;1,2;1,4": 210,
    "1,3;1,3;1,2": 48, "1,3;1,3;1,3": 2048, "1,3;1,3;1,4": 3120,
    "1,3;1,4;1,2": 234, "1,3;1,4;1,3": 3120, "1,3;1,4;1,4": 24570,
    "1,4;1,2;1,2": 21, "1,4;1,2;1,3": 234, "1,4;1,2;1,4": 1323,
    "1,4;1,3;1,2": 210, "1,4;1,3;1,3": 3120, "1,4;1,3;1,4": 24570,
    "1,4;1,4;1,2": 1323, "1,4;1,4;1,3": 24570, "1,4;1,4;1,4": 6751269,
}
Q3_141414_ORDER = 19683
Q7_141414_ORDER = 9261
