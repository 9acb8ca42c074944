"""Component dictionary for the first-order closure of incompressible flow.

The four unknown fields (u1, u2, u3, p) on a space-time box close into a
linear first-order system once every derivative that appears anywhere in the
equations is promoted to a component of a single state vector.  The reduced
state ``Z`` has 55 components: 46 derivative components plus the nine
pointwise advection products ``u_k * du_j/dx_k``.  Four further derivative
components (``du1/dx1`` and the three time derivatives ``du_j/dt``) are not
independent -- they are recovered from ``Z`` through the field equations --
and together with the 55 reduced components they form the extended state
``X`` of length 59.

Everything in this module is index bookkeeping: which derivative lives at
which slot.  All structural matrices (the equation tableau, the first-order
system rows, and the frequency-domain assembly patterns) are generated from
these tables, so there is a single place where the component order is
defined.

Indices in the tables below are 1-based to match the natural "component k"
naming used throughout; helpers convert to 0-based array positions.
"""

from __future__ import annotations

# ---------------------------------------------------------------------------
# Derivative descriptors
# ---------------------------------------------------------------------------
# A descriptor is (field, (dt, d1, d2, d3)): the derivative order in time and
# in each spatial direction applied to one of the four base fields.

FIELDS = ("u1", "u2", "u3", "p")

_SECOND_ORDER_PATTERN = [
    (2, 0, 0, 0),
    (0, 2, 0, 0),
    (0, 0, 2, 0),
    (0, 0, 0, 2),
    (1, 1, 0, 0),
    (1, 0, 1, 0),
    (1, 0, 0, 1),
    (0, 1, 1, 0),
    (0, 1, 0, 1),
    (0, 0, 1, 1),
]


def _build_z_descriptors():
    d = {}
    # u1 first-derivative block and the field itself
    d[1] = ("u1", (0, 0, 1, 0))
    d[2] = ("u1", (0, 0, 0, 1))
    d[3] = ("u1", (0, 0, 0, 0))
    # u2 block
    d[4] = ("u2", (0, 1, 0, 0))
    d[5] = ("u2", (0, 0, 1, 0))
    d[6] = ("u2", (0, 0, 0, 1))
    d[7] = ("u2", (0, 0, 0, 0))
    # u3 block
    d[8] = ("u3", (0, 1, 0, 0))
    d[9] = ("u3", (0, 0, 1, 0))
    d[10] = ("u3", (0, 0, 0, 1))
    d[11] = ("u3", (0, 0, 0, 0))
    # pressure block
    d[12] = ("p", (1, 0, 0, 0))
    d[13] = ("p", (0, 1, 0, 0))
    d[14] = ("p", (0, 0, 1, 0))
    d[15] = ("p", (0, 0, 0, 1))
    d[16] = ("p", (0, 0, 0, 0))
    # second derivatives of u1, u2, u3 in a fixed ten-entry pattern
    base = 17
    for field in ("u1", "u2", "u3"):
        for k, orders in enumerate(_SECOND_ORDER_PATTERN):
            d[base + k] = (field, orders)
        base += 10
    return d


#: slots 1..46: derivative components of the reduced state
Z_DESCRIPTORS = _build_z_descriptors()

#: number of reduced state components (46 derivatives + 9 products)
STATE_DIM = 55

#: number of extended state components
EXTENDED_DIM = 59

#: slots of the bare fields inside Z (used by the frequency-domain patterns)
BASE_SLOT = {"u1": 3, "u2": 7, "u3": 11, "p": 16}

# The four extended components that are eliminated through the equations:
# X1 = du1/dx1, X2 = du1/dt, X3 = du2/dt, X4 = du3/dt.
X_HEAD_DESCRIPTORS = {
    1: ("u1", (0, 1, 0, 0)),
    2: ("u1", (1, 0, 0, 0)),
    3: ("u2", (1, 0, 0, 0)),
    4: ("u3", (1, 0, 0, 0)),
}

# ---------------------------------------------------------------------------
# Advection products (slots 47..55)
# ---------------------------------------------------------------------------
# Product slot -> (left slot, right spec).  The left factor is always one of
# the bare velocity slots; the right factor is a first derivative expressed
# as a row over Z.  ("e", k) means the unit row at slot k; ("du1dx1",) means
# the eliminated derivative du1/dx1 = -(Z5 + Z10).

PRODUCT_RULES = {
    47: (3, ("du1dx1",)),   # u1 * du1/dx1
    48: (7, ("e", 1)),      # u2 * du1/dx2
    49: (11, ("e", 2)),     # u3 * du1/dx3
    50: (3, ("e", 4)),      # u1 * du2/dx1
    51: (7, ("e", 5)),      # u2 * du2/dx2
    52: (11, ("e", 6)),     # u3 * du2/dx3
    53: (3, ("e", 8)),      # u1 * du3/dx1
    54: (7, ("e", 9)),      # u2 * du3/dx2
    55: (11, ("e", 10)),    # u3 * du3/dx3
}

# The human-readable meaning of each product slot, used by dumps and by the
# manufactured-solution assemblers.
PRODUCT_FACTORS = {
    47: ("u1", ("u1", (0, 1, 0, 0))),
    48: ("u2", ("u1", (0, 0, 1, 0))),
    49: ("u3", ("u1", (0, 0, 0, 1))),
    50: ("u1", ("u2", (0, 1, 0, 0))),
    51: ("u2", ("u2", (0, 0, 1, 0))),
    52: ("u3", ("u2", (0, 0, 0, 1))),
    53: ("u1", ("u3", (0, 1, 0, 0))),
    54: ("u2", ("u3", (0, 0, 1, 0))),
    55: ("u3", ("u3", (0, 0, 0, 1))),
}

# ---------------------------------------------------------------------------
# Nonzero patterns of the four equation rows (alpha vectors)
# ---------------------------------------------------------------------------
# Row 1 is mass conservation, rows 2..4 are the momentum balances.  Entries
# are symbolic: 1, -1, "tau" or "-mu"; they are instantiated with numeric
# viscosity / specific volume by the tableau module.

ALPHA_PATTERNS = {
    1: {5: 1, 10: 1},
    2: {13: "tau", 18: "-mu", 19: "-mu", 20: "-mu", 47: 1, 48: 1, 49: 1},
    3: {14: "tau", 28: "-mu", 29: "-mu", 30: "-mu", 50: 1, 51: 1, 52: 1},
    4: {15: "tau", 38: "-mu", 39: "-mu", 40: "-mu", 53: 1, 54: 1, 55: 1},
}

# ---------------------------------------------------------------------------
# The sixteen-component carrier vector U and the first-order system rows
# ---------------------------------------------------------------------------
# U collects the fields and their first spatial derivatives:
#   U = (du1/dx1, du1/dt, du2/dt, du3/dt,
#        du1/dx2, du1/dx3, u1,
#        du2/dx1, du2/dx2, du2/dx3, u2,
#        du3/dx1, du3/dx2, du3/dx3, u3, p)
# Each row of the system matrices below is either a unit row ("e", k) over Z
# or a signed equation row ("a", k, sign).

U_DESCRIPTORS = [
    ("u1", (0, 1, 0, 0)),
    ("u1", (1, 0, 0, 0)),
    ("u2", (1, 0, 0, 0)),
    ("u3", (1, 0, 0, 0)),
    ("u1", (0, 0, 1, 0)),
    ("u1", (0, 0, 0, 1)),
    ("u1", (0, 0, 0, 0)),
    ("u2", (0, 1, 0, 0)),
    ("u2", (0, 0, 1, 0)),
    ("u2", (0, 0, 0, 1)),
    ("u2", (0, 0, 0, 0)),
    ("u3", (0, 1, 0, 0)),
    ("u3", (0, 0, 1, 0)),
    ("u3", (0, 0, 0, 1)),
    ("u3", (0, 0, 0, 0)),
    ("p", (0, 0, 0, 0)),
]

#: carrier rows: U = H Z + h, with h carrying the forcing offsets
H_ROWS = [
    ("a", 1, -1), ("a", 2, -1), ("a", 3, -1), ("a", 4, -1),
    ("e", 1), ("e", 2), ("e", 3),
    ("e", 4), ("e", 5), ("e", 6), ("e", 7),
    ("e", 8), ("e", 9), ("e", 10), ("e", 11),
    ("e", 16),
]

#: time-derivative rows: dU/dt = H0 Z + h0
H0_ROWS = [
    ("e", 21), ("e", 17), ("e", 27), ("e", 37),
    ("e", 22), ("e", 23), ("a", 2, -1),
    ("e", 31), ("e", 32), ("e", 33), ("a", 3, -1),
    ("e", 41), ("e", 42), ("e", 43), ("a", 4, -1),
    ("e", 12),
]

#: x1-derivative rows: dU/dx1 = H1 Z
H1_ROWS = [
    ("e", 18), ("e", 21), ("e", 31), ("e", 41),
    ("e", 24), ("e", 25), ("a", 1, -1),
    ("e", 28), ("e", 34), ("e", 35), ("e", 4),
    ("e", 38), ("e", 44), ("e", 45), ("e", 8),
    ("e", 13),
]

#: x2-derivative rows
H2_ROWS = [
    ("e", 24), ("e", 22), ("e", 32), ("e", 42),
    ("e", 19), ("e", 26), ("e", 1),
    ("e", 34), ("e", 29), ("e", 36), ("e", 5),
    ("e", 44), ("e", 39), ("e", 46), ("e", 9),
    ("e", 14),
]

#: x3-derivative rows
H3_ROWS = [
    ("e", 25), ("e", 23), ("e", 33), ("e", 43),
    ("e", 26), ("e", 20), ("e", 2),
    ("e", 35), ("e", 36), ("e", 30), ("e", 6),
    ("e", 45), ("e", 46), ("e", 40), ("e", 10),
    ("e", 15),
]

#: forcing offsets of the carrier (1-based U position -> forcing component)
H_FORCING = {2: 1, 3: 2, 4: 3}
#: forcing offsets of the time-derivative rows
H0_FORCING = {7: 1, 11: 2, 15: 3}

# ---------------------------------------------------------------------------
# Generation from the derivative dictionary
# ---------------------------------------------------------------------------

_X_HEAD_LOOKUP = {desc: k for k, desc in X_HEAD_DESCRIPTORS.items()}
_Z_LOOKUP = {desc: k for k, desc in Z_DESCRIPTORS.items()}


def lookup_descriptor(desc):
    """Locate a derivative descriptor in the extended state.

    Returns ("z", slot) when the descriptor is a reduced component and
    ("x", k) when it is one of the four eliminated components.
    """
    if desc in _Z_LOOKUP:
        return ("z", _Z_LOOKUP[desc])
    if desc in _X_HEAD_LOOKUP:
        return ("x", _X_HEAD_LOOKUP[desc])
    raise KeyError(f"derivative {desc} is not part of the state")


def _bump(desc, axis):
    field, orders = desc
    orders = list(orders)
    orders[axis] += 1
    return (field, tuple(orders))


def derived_rows(axis):
    """Row specs for the derivative of U along an axis (0=t, 1..3=x).

    Generated purely from the derivative dictionary; must agree with the
    literal listings above, which is one of the tableau verification checks.
    Returns (rows, forcing) where forcing maps the 1-based U position to the
    forcing component carried by that row (time axis only).
    """
    rows, forcing = [], {}
    for pos, desc in enumerate(U_DESCRIPTORS, start=1):
        kind, k = lookup_descriptor(_bump(desc, axis))
        if kind == "z":
            rows.append(("e", k))
        else:
            rows.append(("a", k, -1))
            if k >= 2:
                forcing[pos] = k - 1
    return rows, forcing


def carrier_rows():
    """Row specs of U itself, generated from the dictionary."""
    rows, forcing = [], {}
    for pos, desc in enumerate(U_DESCRIPTORS, start=1):
        kind, k = lookup_descriptor(desc)
        if kind == "z":
            rows.append(("e", k))
        else:
            rows.append(("a", k, -1))
            if k >= 2:
                forcing[pos] = k - 1
    return rows, forcing


def spectral_pattern():
    """Monomial pattern of the 46 derivative slots in the frequency domain.

    Slot k of a frequency-domain state vector equals
    ``(i xi_0)^dt (i xi_1)^d1 (i xi_2)^d2 (i xi_3)^d3 * y_base`` where
    ``y_base`` is the vector's value at the bare-field slot of the same
    field.  Returns a list of (slot, base_slot, orders) with 1-based slots.
    """
    out = []
    for slot in range(1, 47):
        field, orders = Z_DESCRIPTORS[slot]
        out.append((slot, BASE_SLOT[field], orders))
    return out


def _describe_descriptor(field, orders):
    dt, d1, d2, d3 = orders
    if dt == d1 == d2 == d3 == 0:
        return field
    num = "d" * (dt + d1 + d2 + d3) + field
    den = "".join(
        f"d{n}" * o for n, o in zip(("t", "x1", "x2", "x3"), (dt, d1, d2, d3))
    )
    return f"{num}/{den}"


def describe_slot(slot):
    """Human-readable name of a reduced state slot (for dumps/reports)."""
    if slot in Z_DESCRIPTORS:
        return _describe_descriptor(*Z_DESCRIPTORS[slot])
    # product slots; the right factor may be an eliminated derivative
    # (du1/dx1) that has no reduced slot of its own
    left, (rfield, rorders) = PRODUCT_FACTORS[slot]
    return f"{left}*({_describe_descriptor(rfield, rorders)})"
