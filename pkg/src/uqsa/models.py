"""Test models: benchmark functions, a simple function set, and the MCFC.

Every model evaluates vectorized: a single point of shape (n_x,) returns a
float, a batch of shape (N, n_x) returns an (N,) array. Evaluations are pure,
so model handles are safe to share across threads.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from .problem import ParameterSpec
from .validation import as_float_array, check_in_unit_interval

FARADAY = 96485.0        # C mol^-1
N_ELECTRONS = 2.0
R_GAS = 8.314            # J mol^-1 K^-1

SOBOL_G_DEFAULT_A = (0.0, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0)
MORRIS_FN_DEFAULT_SEED = 1729


@dataclass(frozen=True)
class Model:
    """A named deterministic response with a fixed input signature."""

    name: str
    param_names: Tuple[str, ...]
    fn: Callable[[np.ndarray], np.ndarray]

    @property
    def n_inputs(self):
        return len(self.param_names)

    def __call__(self, x):
        arr = as_float_array(x, name="x")
        single = arr.ndim == 1
        arr = np.atleast_2d(arr)
        if arr.shape[1] != self.n_inputs:
            raise ValueError(
                f"model {self.name!r} takes {self.n_inputs} inputs, got {arr.shape[1]}"
            )
        out = np.asarray(self.fn(arr), dtype=float)
        return float(out[0]) if single else out


def sobol_g(X, a=SOBOL_G_DEFAULT_A):
    """Product-form g-function on [0, 1]^n_x.

    g(x) = prod_i (|4 x_i - 2| + a_i) / (1 + a_i). The constants a_i >= 0
    control each input's importance: larger a_i flattens the factor and
    shrinks the variance contribution of x_i.
    """
    X = np.atleast_2d(as_float_array(X, name="x"))
    a = as_float_array(a, name="a", ndim=1)
    if np.any(a < 0):
        raise ValueError("g-function constants a must be >= 0")
    if X.shape[1] != a.size:
        raise ValueError(f"expected {a.size} inputs, got {X.shape[1]}")
    check_in_unit_interval(X)
    return np.prod((np.abs(4.0 * X - 2.0) + a) / (1.0 + a), axis=1)


def sobol_g_indices(a=SOBOL_G_DEFAULT_A):
    """Analytic first-order and total Sobol indices of the g-function.

    V_i = (1/3)/(1+a_i)^2 and the total variance is prod(1+V_i) - 1; the
    total index of x_i collects V_i times every product of the other V_k.
    """
    a = as_float_array(a, name="a", ndim=1)
    Vi = (1.0 / 3.0) / (1.0 + a) ** 2
    V = np.prod(1.0 + Vi) - 1.0
    first = Vi / V
    total = np.empty_like(Vi)
    for i in range(a.size):
        others = np.prod(1.0 + np.delete(Vi, i))
        total[i] = Vi[i] * others / V
    return first, total


def ishigami(X, a=7.0, b=0.1):
    """Ishigami function on [-pi, pi]^3: sin(x1) + a sin^2(x2) + b x3^4 sin(x1)."""
    X = np.atleast_2d(as_float_array(X, name="x"))
    if X.shape[1] != 3:
        raise ValueError("ishigami takes 3 inputs")
    if np.any(np.abs(X) > np.pi + 1e-12):
        raise ValueError("ishigami inputs must lie in [-pi, pi]")
    return np.sin(X[:, 0]) + a * np.sin(X[:, 1]) ** 2 + b * X[:, 2] ** 4 * np.sin(X[:, 0])


def ishigami_indices(a=7.0, b=0.1):
    """Analytic Sobol indices of the Ishigami function with U(-pi, pi) inputs."""
    pi4 = np.pi ** 4
    pi8 = np.pi ** 8
    V = a ** 2 / 8.0 + b * pi4 / 5.0 + b ** 2 * pi8 / 18.0 + 0.5
    V1 = 0.5 * (1.0 + b * pi4 / 5.0) ** 2
    V2 = a ** 2 / 8.0
    V13 = 8.0 * b ** 2 * pi8 / 225.0
    first = np.array([V1, V2, 0.0]) / V
    total = np.array([V1 + V13, V2, V13]) / V
    return first, total


@dataclass(frozen=True)
class MorrisCoefficients:
    """Coefficient set of the 20-input Morris screening test function.

    The structured blocks are fixed (first-order 20 on x1..x10, pairwise -15
    within x1..x6, triple -10 within x1..x5, quadruple +5 within x1..x4). All
    remaining first- and second-order coefficients are standard normal draws
    frozen from ``seed``; remaining third- and fourth-order coefficients are
    zero. Draw order: beta0, then the stochastic beta1 entries (i = 11..20),
    then the stochastic beta2 entries row-major over the upper triangle.
    """

    seed: int
    beta0: float = field(init=False, default=0.0)
    beta1: np.ndarray = field(init=False, default=None)
    beta2: np.ndarray = field(init=False, default=None)

    def __post_init__(self):
        rng = np.random.default_rng(self.seed)
        object.__setattr__(self, "beta0", float(rng.normal()))
        beta1 = np.empty(20)
        beta1[:10] = 20.0
        beta1[10:] = rng.normal(size=10)
        beta2 = np.zeros((20, 20))
        for i in range(20):
            for j in range(i + 1, 20):
                beta2[i, j] = -15.0 if (i < 6 and j < 6) else rng.normal()
        beta1.setflags(write=False)
        beta2.setflags(write=False)
        object.__setattr__(self, "beta1", beta1)
        object.__setattr__(self, "beta2", beta2)


# index triples within x1..x5 (third order) and the single quadruple x1..x4
_TRIPLES = [(i, j, l) for i in range(5) for j in range(i + 1, 5) for l in range(j + 1, 5)]


def morris_fn(X, coeffs):
    """Morris test function: 20 inputs on [0, 1], four nested interaction sums.

    Inputs are first mapped to w_i = 2 (x_i - 0.5), except i in {3, 5, 7}
    (1-based) which use the fractional form w_i = 2 (1.1 x_i / (x_i + 0.1) - 0.5).
    """
    X = np.atleast_2d(as_float_array(X, name="x"))
    if X.shape[1] != 20:
        raise ValueError("the Morris function takes 20 inputs")
    check_in_unit_interval(X)
    W = 2.0 * (X - 0.5)
    for idx in (2, 4, 6):
        W[:, idx] = 2.0 * (1.1 * X[:, idx] / (X[:, idx] + 0.1) - 0.5)
    y = coeffs.beta0 + W @ coeffs.beta1
    y = y + np.einsum("ni,ij,nj->n", W, coeffs.beta2, W)
    for i, j, l in _TRIPLES:
        y = y - 10.0 * W[:, i] * W[:, j] * W[:, l]
    return y + 5.0 * W[:, 0] * W[:, 1] * W[:, 2] * W[:, 3]


def sfs(X, k):
    """Simple function set f1..f4 in three inputs.

    f1 = x1 + x2 + x3                 (linear)
    f2 = x1 + x1 x2 + x3              (interaction)
    f3 = x1 + x2^2 + x3^3             (nonlinearity)
    f4 = x1 + x1 x2^2 + x3^3          (both)
    """
    X = np.atleast_2d(as_float_array(X, name="x"))
    if X.shape[1] != 3:
        raise ValueError("the simple function set takes 3 inputs")
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    if k == 1:
        return x1 + x2 + x3
    if k == 2:
        return x1 + x1 * x2 + x3
    if k == 3:
        return x1 + x2 ** 2 + x3 ** 3
    if k == 4:
        return x1 + x1 * x2 ** 2 + x3 ** 3
    raise ValueError(f"k must be in 1..4, got {k}")


# ---------------------------------------------------------------------------
# Molten carbonate fuel cell
# ---------------------------------------------------------------------------

MCFC_PARAM_NAMES = (
    "j", "T", "E_act_an", "E_act_cat",
    "p_H2_an", "p_CO2_an", "p_H2O_an", "p_O2_cat", "p_CO2_cat",
)

# nominal operating point: j (A m^-2), T (K), activation energies (J mol^-1),
# partial pressures (atm)
MCFC_NOMINALS = (3000.0, 893.0, 53500.0, 77300.0, 0.6, 0.15, 0.25, 0.08, 0.08)
MCFC_REL_UNCERTAINTY = (0.01, 0.01, 0.01, 0.01, 0.05, 0.05, 0.05, 0.05, 0.05)

# Molar enthalpy of H2 + 1/2 O2 -> H2O(g) near the operating temperature.
# This scales the efficiency only; see McfcParams to override.
DELTA_H_DEFAULT = -247300.0  # J mol^-1


@dataclass(frozen=True)
class McfcParams:
    """Operating point and physical constants of the MCFC model.

    Defaults are the nominal operating conditions; ``delta_h`` (J mol^-1,
    negative) and the effective area (m^2) are configurable because power is
    reported per unit area.
    """

    j: float = 3000.0            # A m^-2
    T: float = 893.0             # K
    E_act_an: float = 53500.0    # J mol^-1
    E_act_cat: float = 77300.0   # J mol^-1
    p_H2_an: float = 0.6         # atm
    p_CO2_an: float = 0.15
    p_H2O_an: float = 0.25
    p_O2_cat: float = 0.08
    p_CO2_cat: float = 0.08
    delta_h: float = DELTA_H_DEFAULT
    area: float = 1.0            # m^2

    def __post_init__(self):
        positives = ("j", "T", "E_act_an", "E_act_cat", "p_H2_an", "p_CO2_an",
                     "p_H2O_an", "p_O2_cat", "p_CO2_cat")
        for name in positives[1:]:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.j < 0:
            raise ValueError("j must be >= 0")
        if self.delta_h >= 0:
            raise ValueError("delta_h must be negative (exothermic reaction)")

    def as_row(self):
        return np.array([getattr(self, n) for n in MCFC_PARAM_NAMES])


def mcfc_voltage_terms(X):
    """Equilibrium potential and overpotentials of the MCFC, per row of X.

    Columns of X follow MCFC_PARAM_NAMES. Returns (E0, E, U_an, U_cat, U_ohm):

        E0    = (242000 - 45.8 T) / (n_e F)
        E     = E0 + (R T / n_e F) ln[ p_H2,an p_O2,cat^0.5 p_CO2,cat
                                       / (p_H2O,an p_CO2,an) ]
        U_an  = 2.27e-9  j exp(E_act,an  / (R T)) p_H2,an^-0.42
                p_CO2,an^-0.17 p_H2O,an^-1.00
        U_cat = 7.505e-10 j exp(E_act,cat / (R T)) p_O2,cat^-0.43 p_CO2,cat^-0.09
        U_ohm = 0.5e-4   j exp(3016 (1/T - 1/923))
    """
    X = np.atleast_2d(as_float_array(X, name="x"))
    if X.shape[1] != 9:
        raise ValueError("the MCFC model takes 9 inputs")
    j, T, E_an, E_cat, pH2a, pCO2a, pH2Oa, pO2c, pCO2c = X.T
    if np.any(X[:, 1:] <= 0):
        raise ValueError("temperature, activation energies, and pressures must be > 0")
    ne_f = N_ELECTRONS * FARADAY
    e0 = (242000.0 - 45.8 * T) / ne_f
    e = e0 + (R_GAS * T / ne_f) * np.log(pH2a * np.sqrt(pO2c) * pCO2c / (pH2Oa * pCO2a))
    u_an = 2.27e-9 * j * np.exp(E_an / (R_GAS * T)) * pH2a ** -0.42 * pCO2a ** -0.17 * pH2Oa ** -1.0
    u_cat = 7.505e-10 * j * np.exp(E_cat / (R_GAS * T)) * pO2c ** -0.43 * pCO2c ** -0.09
    u_ohm = 0.5e-4 * j * np.exp(3016.0 * (1.0 / T - 1.0 / 923.0))
    return e0, e, u_an, u_cat, u_ohm


def mcfc_power_efficiency(X, delta_h=DELTA_H_DEFAULT, area=1.0):
    """Power density (W m^-2) and first-law efficiency of the MCFC.

    The cell voltage is the equilibrium potential minus the three
    overpotentials (see ``mcfc_voltage_terms``); then P = j A V and
    eta = n_e F V / (-delta_h). The voltage may go negative at extreme
    current density; that is a valid operating regime, not an error.
    """
    X = np.atleast_2d(as_float_array(X, name="x"))
    _, e, u_an, u_cat, u_ohm = mcfc_voltage_terms(X)
    voltage = e - u_an - u_cat - u_ohm
    power = X[:, 0] * area * voltage
    eta = N_ELECTRONS * FARADAY * voltage / (-delta_h)
    return power, eta


def mcfc_outputs(params):
    """Evaluate one MCFC operating point; returns (P, eta)."""
    power, eta = mcfc_power_efficiency(
        params.as_row(), delta_h=params.delta_h, area=params.area
    )
    return float(power[0]), float(eta[0])


def mcfc_specs(j_nominal=None, j_uncertainty=0.01, params=None):
    """Parameter specs for the MCFC study (all normal, physically positive).

    With ``j_nominal`` set, the current density is included as an uncertain
    parameter (9 specs); otherwise only the other 8 are returned and j is
    treated as deterministic.
    """
    base = params if params is not None else McfcParams()
    specs = []
    for name, rel in zip(MCFC_PARAM_NAMES, MCFC_REL_UNCERTAINTY):
        if name == "j":
            if j_nominal is None:
                continue
            specs.append(ParameterSpec.normal("j", float(j_nominal),
                                              rel_uncertainty=j_uncertainty,
                                              positive_only=True))
        else:
            specs.append(ParameterSpec.normal(name, getattr(base, name),
                                              rel_uncertainty=rel,
                                              positive_only=True))
    return specs


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

def _numbered(prefix, n):
    return tuple(f"{prefix}{i}" for i in range(1, n + 1))


def _build_sobol_g(a=SOBOL_G_DEFAULT_A):
    a = tuple(float(v) for v in a)
    return Model("sobol_g", _numbered("x", len(a)), lambda X: sobol_g(X, a))


def _build_ishigami(a=7.0, b=0.1):
    return Model("ishigami", _numbered("x", 3), lambda X: ishigami(X, a, b))


def _build_morris_fn(coeff_seed=MORRIS_FN_DEFAULT_SEED):
    coeffs = MorrisCoefficients(seed=int(coeff_seed))
    return Model("morris_fn", _numbered("x", 20), lambda X: morris_fn(X, coeffs))


def _build_sfs(k):
    return Model(f"sfs{k}", _numbered("x", 3), lambda X: sfs(X, k))


def _build_mcfc(output, delta_h=DELTA_H_DEFAULT, area=1.0):
    idx = 0 if output == "power" else 1
    name = "mcfc_power" if output == "power" else "mcfc_eta"
    return Model(name, MCFC_PARAM_NAMES,
                 lambda X: mcfc_power_efficiency(X, delta_h=delta_h, area=area)[idx])


_BUILDERS = {
    "sobol_g": _build_sobol_g,
    "ishigami": _build_ishigami,
    "morris_fn": _build_morris_fn,
    "sfs1": lambda **kw: _build_sfs(1),
    "sfs2": lambda **kw: _build_sfs(2),
    "sfs3": lambda **kw: _build_sfs(3),
    "sfs4": lambda **kw: _build_sfs(4),
    "mcfc_power": lambda **kw: _build_mcfc("power", **kw),
    "mcfc_eta": lambda **kw: _build_mcfc("eta", **kw),
}


def list_models():
    return sorted(_BUILDERS)


def get_model(name, **kwargs):
    """Build a registered model by name, forwarding model-specific options."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; known: {', '.join(list_models())}")
    return builder(**kwargs)


def default_specs(name):
    """Canonical input specs for a registered model."""
    if name == "sobol_g":
        return [ParameterSpec.uniform(p, 0.0, 1.0) for p in _numbered("x", 8)]
    if name == "ishigami":
        return [ParameterSpec.uniform(p, -math.pi, math.pi) for p in _numbered("x", 3)]
    if name == "morris_fn":
        return [ParameterSpec.uniform(p, 0.0, 1.0) for p in _numbered("x", 20)]
    if name in ("sfs1", "sfs2", "sfs3", "sfs4"):
        return [ParameterSpec.uniform(p, 0.0, 1.0) for p in _numbered("x", 3)]
    if name in ("mcfc_power", "mcfc_eta"):
        return mcfc_specs(j_nominal=MCFC_NOMINALS[0])
    raise ValueError(f"unknown model {name!r}")
