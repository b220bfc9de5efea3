"""JSON run configurations for the hardylab CLI."""

import json
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional, Tuple, Union

from config.settings import ANGULAR_NODES, REPORT_FORMATS, SPHERE_TOL, SWEEP_STEPS, THEOREMS
from core.errors import ConfigError, RegimeViolation, require_finite
from core.fractional import SCHEMES
from core.profiles import TEST_CATALOG, TestFunction, testfunction_from_dict
from core.rearrangement import HomogeneousWeight
from core.regimes import CaseId, FracRegime, Regime, admissible_q, classify_case13
from core.sphere import (
    DEFAULT_QUADRATURE, WEIGHT_CATALOG, SphereQuadrature, SphericalWeight, load_sampled_weight,
)

COMMANDS = ('constant', 'verify', 'sweep', 'lambda', 'rearrange', 'selftest')

Descriptor = Union[str, Dict[str, Any]]


@dataclass(frozen=True)
class RunConfig:
    """A validated run of one CLI command."""

    command: str
    theorems: Tuple[str, ...] = ()
    N: Optional[int] = None
    p: Optional[float] = None
    alpha: float = 0.0
    s: Optional[float] = None
    q: Optional[float] = None
    case: Optional[str] = None
    degree: Optional[float] = None
    weights: Tuple[Descriptor, ...] = ('one',)
    tests: Tuple[Descriptor, ...] = ()
    levels: Tuple[float, ...] = (0.5, 1.0, 2.0)
    steps: int = SWEEP_STEPS
    scheme: str = 'gauss-graded'
    empirical: Optional[float] = None
    quadrature: SphereQuadrature = DEFAULT_QUADRATURE
    output: Optional[str] = None
    format: str = 'csv'

    def weight_objects(self) -> List[SphericalWeight]:
        out = []
        for desc in self.weights:
            if desc == 'all':
                out.extend(WEIGHT_CATALOG.values())
            else:
                out.append(resolve_weight(desc))
        return out

    def test_objects(self) -> List[TestFunction]:
        if not self.tests:
            return list(TEST_CATALOG.values())
        return [testfunction_from_dict(desc) for desc in self.tests]

    @property
    def rearrange_degree(self) -> float:
        return self.degree if self.degree is not None else self.p + self.alpha


def resolve_weight(desc: Descriptor) -> SphericalWeight:
    """Catalog name, ``{'path': csv}`` or ``{'kind': ..., **fields}``."""
    if isinstance(desc, str):
        if desc not in WEIGHT_CATALOG:
            raise ConfigError(f"unknown weight: {desc} (choose from "
                              f"{', '.join(WEIGHT_CATALOG)})", 'parse_config')
        return WEIGHT_CATALOG[desc]
    if not isinstance(desc, dict):
        raise ConfigError(f"weight must be a name or an object (got {desc!r})", 'parse_config')
    if 'path' in desc:
        return load_sampled_weight(desc['path'])
    data = dict(desc)
    for key in ('angles', 'values'):
        if key in data:
            data[key] = tuple(float(v) for v in data[key])
    try:
        return SphericalWeight(**data)
    except TypeError as e:
        raise ConfigError(f"bad weight descriptor {desc!r}: {e}", 'parse_config')


def _require(data: Dict, *names: str) -> None:
    missing = [n for n in names if data.get(n) is None]
    if missing:
        raise ConfigError(f"missing required field(s) for {data['command']}: "
                          f"{', '.join(missing)}", 'parse_config')


def _check_theorem(theorem: str, data: Dict) -> None:
    """Re-check the regime of ``theorem`` so violations surface before dispatch."""
    if theorem not in THEOREMS:
        raise ConfigError(f"unknown theorem: {theorem} (choose from {', '.join(THEOREMS)})",
                          'parse_config')
    if theorem == 'thm14':
        _require(data, 'N', 's', 'p')
        FracRegime(data['N'], data['s'], data['p'])
        return
    _require(data, 'N', 'p')
    regime = Regime(data['N'], data['p'], data['alpha'])
    if theorem in ('thm11', 'thm13') and regime.p != 2:
        raise RegimeViolation(f"p = 2 required for {theorem} (got p = {regime.p:g})",
                              'parse_config')
    if theorem == 'thm11' and (regime.alpha != 0 or regime.N < 3):
        raise RegimeViolation(f"alpha = 0 and N >= 3 required for thm11 "
                              f"(N = {regime.N}, alpha = {regime.alpha:g})", 'parse_config')
    if theorem in ('thm11', 'thm12', 'thm13', 'thm31'):
        regime.require_sphere('parse_config')
    if theorem == 'thm12':
        admissible_q(regime.N, regime.p, data.get('q'))
    elif theorem == 'thm13':
        classify_case13(regime.N, regime.alpha, CaseId(data['case']) if data.get('case') else None)
    elif theorem == 'thm31':
        regime.require_positive_degree('parse_config')


def _normalise(data: Dict) -> Dict:
    out = dict(data)
    theorems = out.pop('theorem', None)
    if theorems is not None and 'theorems' in out:
        raise ConfigError("give either 'theorem' or 'theorems'", 'parse_config')
    theorems = out.pop('theorems', theorems)
    if isinstance(theorems, str):
        theorems = [theorems]
    out['theorems'] = tuple(theorems or ())
    # p = 2 is implied by the sharp p = 2 inequalities
    if out['theorems'] and set(out['theorems']) <= {'thm11', 'thm13'} and out.get('p') is None:
        out['p'] = 2.0

    if 'weight' in out:
        out['weights'] = [out.pop('weight')]
    if 'test' in out:
        out['tests'] = [out.pop('test')]
    for key in ('weights', 'tests'):
        if key in out:
            value = out[key]
            out[key] = tuple(value) if isinstance(value, list) else (value,)

    if out.get('N') is not None:
        if isinstance(out['N'], bool) or not float(out['N']).is_integer():
            raise ConfigError(f"N must be an integer (got {out['N']})", 'parse_config')
        out['N'] = int(out['N'])
    for key in ('p', 'alpha', 's', 'q', 'degree', 'empirical'):
        if out.get(key) is not None:
            out[key] = float(out[key])
            require_finite('parse_config', **{key: out[key]})
    if out.get('alpha') is None:
        out['alpha'] = 0.0
    if 'levels' in out:
        out['levels'] = tuple(float(t) for t in out['levels'])
    if 'steps' in out:
        out['steps'] = int(out['steps'])
    if 'quadrature' in out:
        quad = out['quadrature']
        out['quadrature'] = SphereQuadrature(int(quad.get('angular_nodes', ANGULAR_NODES)),
                                             float(quad.get('tolerance', SPHERE_TOL)))
    return out


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e}", 'parse_config')
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object", 'parse_config')
    if data.get('command') not in COMMANDS:
        raise ConfigError(f"unknown or missing command: {data.get('command')} "
                          f"(choose from {', '.join(COMMANDS)})", 'parse_config')

    data = _normalise(data)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(unknown)}", 'parse_config')
    config = RunConfig(**data)
    _validate(config, data)
    return config


def _validate(config: RunConfig, data: Dict) -> None:
    command = config.command
    if config.format not in REPORT_FORMATS:
        raise ConfigError(f"unknown report format: {config.format}", 'parse_config')
    if config.scheme not in SCHEMES:
        raise ConfigError(f"unknown quadrature scheme: {config.scheme}", 'parse_config')

    if command in ('constant', 'verify', 'sweep'):
        if not config.theorems:
            raise ConfigError(f"missing required field(s) for {command}: theorem",
                              'parse_config')
        for theorem in config.theorems:
            _check_theorem(theorem, data)
        config.weight_objects()
        config.test_objects()
    if command == 'sweep' and config.steps < 1:
        raise ConfigError(f"steps must be >= 1 (got {config.steps})", 'parse_config')
    if command == 'lambda':
        _require(data, 'N', 's', 'p')
        FracRegime(config.N, config.s, config.p)
    if command == 'rearrange':
        _require(data, 'N')
        if config.degree is None:
            _require(data, 'p')
        if any(not t > 0 for t in config.levels):
            raise ConfigError(f"levels must be > 0 (got {list(config.levels)})", 'parse_config')
        for g in config.weight_objects():
            HomogeneousWeight(g, config.rearrange_degree).require_dimension(config.N,
                                                                            'parse_config')


def serialize_config(config: RunConfig) -> str:
    """JSON text that parse_config maps back to an equal RunConfig."""
    data = {}
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if f.name == 'quadrature':
            value = {'angular_nodes': value.angular_nodes, 'tolerance': value.tolerance}
        elif isinstance(value, tuple):
            value = list(value)
        data[f.name] = value
    return json.dumps(data, indent=2, sort_keys=True)
