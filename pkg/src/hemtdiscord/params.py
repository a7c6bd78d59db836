"""Device/circuit configuration and the derived circuit constants.

All quantities are SI. The nonlinear Hamiltonian constants are stored as rates
(rad/s): every energy coefficient is divided by hbar once, here, so the rest of
the package never sees hbar except where a drive amplitude is converted to a
ladder-operator amplitude.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

from scipy.constants import hbar, k as k_B

from .errors import ConfigError, DegenerateNetworkError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviceParams:
    """Small-signal InP HEMT model plus matching network and bath.

    Field names follow the usual circuit symbols; the JSON keys are their
    lower-case forms (see ``CONFIG_KEYS``).
    """

    Rg: float
    Lg: float
    Ld: float
    Cgs: float
    Cds: float
    Cgd: float
    Ri: float
    Rj: float
    gd: float
    gm: float
    Vg: float
    Vd: float
    T: float
    Td: float
    Cin: float
    C1: float
    C2: float
    L1: float
    L2: float
    Vrf: float
    Bn: float
    kappa1: float
    kappa2: float
    # bath temperature seen by the second oscillator; None means T
    T2: float | None = None

    def __post_init__(self):
        strictly_positive = (
            "Rg", "Lg", "Ld", "Cgs", "Cds", "Cgd", "Ri", "Rj", "T", "Td",
            "Cin", "C1", "C2", "L1", "L2", "Bn", "kappa1", "kappa2",
        )
        for name in strictly_positive:
            _check_finite(self, name)
            if getattr(self, name) <= 0:
                raise ConfigError(f"must be > 0, got {getattr(self, name)!r}", name)
        for name in ("gd", "gm"):
            _check_finite(self, name)
            if getattr(self, name) < 0:
                raise ConfigError(f"must be >= 0, got {getattr(self, name)!r}", name)
        for name in ("Vg", "Vd", "Vrf"):
            _check_finite(self, name)
        if self.T2 is not None:
            _check_finite(self, "T2")
            if self.T2 <= 0:
                raise ConfigError(f"must be > 0, got {self.T2!r}", "T2")

    @property
    def bath_T2(self) -> float:
        return self.T if self.T2 is None else self.T2


@dataclass(frozen=True)
class NonlinearInputs:
    """Nonlinearity factor gN2 (A/V^2) and nonlinear capacitance CN (F)."""

    gN2: float = 1.0
    CN: float = 1.0e-12

    def __post_init__(self):
        for name in ("gN2", "CN"):
            _check_finite(self, name)
            if getattr(self, name) < 0:
                raise ConfigError(f"must be >= 0, got {getattr(self, name)!r}", name)


@dataclass(frozen=True)
class DerivedConstants:
    CA: float
    CB: float
    Cc: float
    CAprime: float
    CM2: float
    CM4: float
    Cq1: float
    Cq2: float
    Cq1q2: float
    Lp2: float
    L2prime: float
    g12: float
    g22: float
    g12prime: float
    g22prime: float
    Vq1: float
    Vq2: float
    Ip2: float
    Igs_rms: float
    Ids_rms: float
    omega1: float
    omega2: float
    Z1: float
    Z2: float
    gm: float


@dataclass(frozen=True)
class CouplingConstants:
    """Rates (rad/s) multiplying the six cubic ladder-operator terms."""

    gN11: float
    gN21: float
    gN31: float
    gN41: float
    gN51: float
    gN61: float

    def scaled(self, factor: float) -> "CouplingConstants":
        return CouplingConstants(*(factor * v for v in astuple_floats(self)))


def astuple_floats(record) -> tuple:
    return tuple(getattr(record, f.name) for f in fields(record))


def _check_finite(record, name):
    value = getattr(record, name)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"must be a number, got {value!r}", name)
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {value!r}", name)


# ---------------------------------------------------------------------------
# configuration documents

# section -> json key -> (attribute, default); default None means required
CONFIG_KEYS: dict[str, dict[str, tuple[str, Any]]] = {
    "device": {
        "rg": ("Rg", None),
        "lg": ("Lg", None),
        "ld": ("Ld", None),
        "cgs": ("Cgs", None),
        "cds": ("Cds", None),
        "cgd": ("Cgd", None),
        "ri": ("Ri", None),
        "rj": ("Rj", None),
        "gd": ("gd", None),
        "gm": ("gm", None),
        "vg": ("Vg", None),
        "vd": ("Vd", None),
    },
    "matching": {
        "cin": ("Cin", 100e-15),
        "c1": ("C1", 100e-15),
        "c2": ("C2", 1.0e-12),
        # calibrated with the bundled device values, C2 = 1 pF, CN = 1 pF, gN2 = 1:
        # f1 = 7.15 GHz, f2 = 4.85 GHz (see calibrate_inductances)
        "l1": ("L1", 9.689e-11),
        "l2": ("L2", 1.504e-09),
        "vrf": ("Vrf", 3.0e-5),
    },
    "bath": {
        "t": ("T", None),
        "td": ("Td", 450.0),
        "bn": ("Bn", 1.0),
        "kappa1": ("kappa1", TWO_PI * 100e6),
        "kappa2": ("kappa2", TWO_PI * 100e6),
        "t2": ("T2", "none"),
    },
    "nonlinear": {
        "gn2": ("gN2", 1.0),
        "cn": ("CN", 1.0e-12),
    },
}

_OPTIONAL_NONE = "none"


def config_key_index() -> dict[str, str]:
    """Map every bare JSON key to its section (keys are unique across sections)."""
    return {key: section for section, keys in CONFIG_KEYS.items() for key in keys}


def config_from_dict(doc: Mapping[str, Any]) -> tuple[DeviceParams, NonlinearInputs]:
    if not isinstance(doc, Mapping):
        raise ConfigError("top level must be a JSON object")
    unknown = set(doc) - set(CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown section(s) {sorted(unknown)}", sorted(unknown)[0])

    device_kw: dict[str, Any] = {}
    nonlinear_kw: dict[str, Any] = {}
    for section, keys in CONFIG_KEYS.items():
        body = doc.get(section, {})
        if not isinstance(body, Mapping):
            raise ConfigError("section must be a JSON object", section)
        extra = set(body) - set(keys)
        if extra:
            key = sorted(extra)[0]
            raise ConfigError("unknown key", f"{section}.{key}")
        target = nonlinear_kw if section == "nonlinear" else device_kw
        for key, (attr, default) in keys.items():
            if key in body:
                value = body[key]
                if value is None and default == _OPTIONAL_NONE:
                    target[attr] = None
                    continue
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise ConfigError(f"must be a number, got {value!r}", f"{section}.{key}")
                target[attr] = float(value)
            elif default is None:
                raise ConfigError("missing required field", f"{section}.{key}")
            elif default == _OPTIONAL_NONE:
                target[attr] = None
            else:
                target[attr] = default
    try:
        return DeviceParams(**device_kw), NonlinearInputs(**nonlinear_kw)
    except ConfigError as exc:
        # re-label with the JSON path the user wrote
        attr_to_key = {
            attr: f"{section}.{key}"
            for section, keys in CONFIG_KEYS.items()
            for key, (attr, _) in keys.items()
        }
        field = attr_to_key.get(exc.field, exc.field)
        raise ConfigError(str(exc).split(": ", 1)[-1], field) from None


def load_config(path) -> tuple[DeviceParams, NonlinearInputs]:
    """Read a JSON configuration file.

    Raises
    ------
    ConfigError
        File missing or unparseable, unknown key, missing required field, or a
        value violating a physical invariant. The message names the field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file ({exc.strerror})", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}", str(path)) from None
    return config_from_dict(doc)


def config_to_dict(p: DeviceParams, n: NonlinearInputs) -> dict[str, dict[str, Any]]:
    values = {**asdict(p), **asdict(n)}
    return {
        section: {key: values[attr] for key, (attr, _) in keys.items()}
        for section, keys in CONFIG_KEYS.items()
    }


def apply_overrides(
    p: DeviceParams, n: NonlinearInputs, overrides: Mapping[str, float]
) -> tuple[DeviceParams, NonlinearInputs]:
    """Return new records with bare or dotted config keys replaced.

    ``{"c2": 0.5e-12}`` and ``{"matching.c2": 0.5e-12}`` are equivalent.
    """
    doc = config_to_dict(p, n)
    index = config_key_index()
    for raw_key, value in overrides.items():
        section, _, key = raw_key.rpartition(".")
        section = section or index.get(key)
        if section not in CONFIG_KEYS or key not in CONFIG_KEYS[section]:
            raise ConfigError("unknown override key", raw_key)
        doc[section][key] = value
    return config_from_dict(doc)


def default_config_path() -> Path:
    return Path(__file__).with_name("data") / "device_defaults.json"


def default_config() -> tuple[DeviceParams, NonlinearInputs]:
    return load_config(default_config_path())


# ---------------------------------------------------------------------------
# derived constants


def noise_currents(p: DeviceParams) -> dict[str, float]:
    """Johnson-noise RMS currents sqrt(4 kB T G Bn) of the lossy elements.

    The gate resistance Rg drives the gate node, Rj the gate-drain branch,
    Ri the gate-source branch and gd (at the drain noise temperature Td) the
    drain node.
    """
    def rms(temperature, conductance):
        return math.sqrt(4.0 * k_B * temperature * conductance * p.Bn)

    return {
        "Ig": rms(p.T, 1.0 / p.Rg),
        "Ii": rms(p.T, 1.0 / p.Ri),
        "Ij": rms(p.T, 1.0 / p.Rj),
        "Id": rms(p.Td, p.gd),
    }


def _signed_sqrt(x):
    return math.copysign(math.sqrt(abs(x)), x)


def derive_linear_constants(p: DeviceParams, n: NonlinearInputs) -> DerivedConstants:
    """Effective capacitances, inductances, couplings and drives of the linear
    Hamiltonian, plus the two oscillator frequencies and impedances.

    ``CM4`` is the squared capacitance-matrix determinant
    ``(CB*(CA + CN) - Cc**2)**2``; with that reading ``1/Cq1``, ``1/Cq2`` and
    ``1/Cq1q2`` reduce to the inverse capacitance matrix when CN = 0 and every
    constant carries consistent SI units.
    """
    CA = p.Cin + p.C1 + p.Cgs + p.Cgd
    CB = p.Cgd + p.C2
    Cc = p.Cgd
    CAp = CA + n.CN
    CM2 = CB * CAp - Cc**2
    if not CM2 > 0:
        raise DegenerateNetworkError(f"degenerate capacitance network (CB*CA' - Cc^2 = {CM2:g})")
    CM4 = CM2**2
    gm, gN2, Cin, Vrf = p.gm, n.gN2, p.Cin, p.Vrf

    inv_Cq1 = (CB**2 * CA - Cc**2 * CB) / CM4
    inv_Cq2 = (Cc**2 * CA + CAp**2 * CB - 2.0 * Cc**2 * CAp) / CM4
    inv_Cq1q2 = (CB * Cc * CA - Cc**3) / CM4
    inv_Lp2 = (gm**2 * CB**2 * CA - 2.0 * gm**2 * Cc**2 * CB) / CM4

    g12 = (-2.0 * gm * CB**2 * CA + 3.0 * gm * Cc**2 * CB) / (2.0 * CM4)
    g22 = (-gm * CB * Cc * CA + gm * CB * Cc * CAp + gm * Cc**3) / CM4
    Vq1 = (CB**2 * Cin * CA * Vrf - CB * Cin * Cc**2 * Vrf) / CM4
    Vq2 = (CB * Cc * Cin * CA * Vrf + 0.5 * CB * Cc * Cin * CAp * Vrf - Cin * Cc**3 * Vrf) / CM4

    noise = noise_currents(p)
    # the current symbols enter squared; Igs^2 = Ig^2 - Ij^2, Ids^2 = Id^2 + Ij^2
    Igs = _signed_sqrt(noise["Ig"] ** 2 - noise["Ij"] ** 2)
    Ids = math.sqrt(noise["Id"] ** 2 + noise["Ij"] ** 2)
    Ip2 = (-gm * CB**2 * Cin * CA * Vrf + gm * CB * Cc**2 * Cin * Vrf) / CM4 - Ids

    inv_L2p = 1.0 / (2.0 * p.L2) + 0.5 * inv_Lp2 - 2.0 * gm * gN2 * CB**2 * Cin * Vrf / CM4
    g12p = g12 + 2.0 * gN2 * CB**2 * Cin * Vrf / CM4
    g22p = g22 + 2.0 * gN2 * CB * Cc * Cin * Vrf / CM4

    values = {
        "Cq1": 1.0 / inv_Cq1 if inv_Cq1 else math.inf,
        "Cq2": 1.0 / inv_Cq2 if inv_Cq2 else math.inf,
        "Cq1q2": 1.0 / inv_Cq1q2 if inv_Cq1q2 else math.inf,
        "Lp2": 1.0 / inv_Lp2 if inv_Lp2 else math.inf,
        "L2prime": 1.0 / inv_L2p if inv_L2p else math.inf,
    }
    for name in ("Cq1", "Cq2", "L2prime"):
        if not (math.isfinite(values[name]) and values[name] > 0):
            raise DegenerateNetworkError(f"non-finite or non-positive constant {name} = {values[name]!r}")
    Cq1, Cq2, L2p = values["Cq1"], values["Cq2"], values["L2prime"]
    omega1 = 1.0 / math.sqrt(p.L1 * Cq1)
    omega2 = 1.0 / math.sqrt(L2p * Cq2)
    Z1 = math.sqrt(p.L1 / Cq1)
    Z2 = math.sqrt(L2p / Cq2)

    d = DerivedConstants(
        CA=CA, CB=CB, Cc=Cc, CAprime=CAp, CM2=CM2, CM4=CM4,
        Cq1=Cq1, Cq2=Cq2, Cq1q2=values["Cq1q2"], Lp2=values["Lp2"], L2prime=L2p,
        g12=g12, g22=g22, g12prime=g12p, g22prime=g22p,
        Vq1=Vq1, Vq2=Vq2, Ip2=Ip2, Igs_rms=Igs, Ids_rms=Ids,
        omega1=omega1, omega2=omega2, Z1=Z1, Z2=Z2, gm=gm,
    )
    for name, value in asdict(d).items():
        if name in ("Cq1q2", "Lp2"):
            # a vanishing inverse is legitimate (e.g. gm = 0); infinity is fine
            if math.isnan(value):
                raise DegenerateNetworkError(f"non-finite constant {name}")
        elif not math.isfinite(value):
            raise DegenerateNetworkError(f"non-finite constant {name} = {value!r}")
    return d


def derive_coupling_constants(d: DerivedConstants, n: NonlinearInputs) -> CouplingConstants:
    """Cubic coupling rates of the nonlinear Hamiltonian in ladder form.

    Each rate is the ladder-operator coefficient obtained by substituting
    ``phi_k = sqrt(hbar Z_k / 2) (a_k + a_k^+)`` and
    ``Q_k = -i sqrt(hbar / 2 Z_k) (a_k - a_k^+)``, divided by hbar.
    """
    if not d.CM4 > 0:
        raise DegenerateNetworkError("degenerate capacitance network (CM4 <= 0)")
    pre = n.gN2 / d.CM4
    Z1, Z2, gm, CB, Cc = d.Z1, d.Z2, d.gm, d.CB, d.Cc
    phi2 = math.sqrt(hbar * Z2 / 2.0)      # flux zero-point amplitude / 1
    q1 = math.sqrt(hbar / (2.0 * Z1))
    q2 = math.sqrt(hbar / (2.0 * Z2))
    return CouplingConstants(
        gN11=pre * CB**2 * phi2 / (2.0 * Z1),
        gN21=pre * Cc**2 * phi2 / (2.0 * Z2),
        gN31=pre * gm**2 * CB**2 * Z2 * phi2 / 2.0,
        gN41=pre * gm * CB**2 * Z2 * q1,
        gN51=pre * gm * CB * Cc * Z2 * q2,
        gN61=pre * gm * CB * Cc * phi2,
    )


def calibrate_inductances(
    p: DeviceParams, n: NonlinearInputs, f1: float, f2: float
) -> DeviceParams:
    """Return ``p`` with L1, L2 chosen so the oscillators resonate at f1, f2 (Hz).

    Calibration is exact for the supplied ``n``; the gN2-dependent drive term
    in 1/L2' shifts f2 slightly when gN2 changes afterwards.
    """
    probe = derive_linear_constants(replace(p, L1=1.0, L2=1.0), n)
    w1, w2 = TWO_PI * f1, TWO_PI * f2
    L1 = 1.0 / (w1**2 * probe.Cq1)
    # 1/L2' is affine in 1/(2 L2); remove the L2 = 1 H contribution
    rest = 1.0 / probe.L2prime - 0.5
    half_inv_L2 = w2**2 * probe.Cq2 - rest
    if not half_inv_L2 > 0:
        raise ConfigError(
            f"f2 = {f2:g} Hz is below the floor set by Lp2 for this network", "l2"
        )
    return replace(p, L1=L1, L2=1.0 / (2.0 * half_inv_L2))
