"""
Bundled scenario files and plan files
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from ancova_check.config import settings
from ancova_check.exceptions import PlanError, UnknownScenarioError
from ancova_check.models.simulation import SimPlan

logger = logging.getLogger(__name__)

DEFAULT_SUITE = ('S0', 'S1', 'S1-swap', 'S2', 'S3', 'W0')


def _read_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise PlanError(f"{path}: file not found") from None
    except json.JSONDecodeError as exc:
        raise PlanError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def scenario_files(directory: Optional[Path] = None) -> Dict[str, Path]:
    """Scenario name -> file for every scenario in the directory"""
    directory = Path(directory or settings.SCENARIO_DIR)
    found = {}
    for path in sorted(directory.glob('*.json')):
        data = _read_json(path)
        found[str(data.get('name', path.stem))] = path
    return found


def plan_from_document(data: Dict[str, Any], default_seed: Optional[int] = None) -> SimPlan:
    """A scenario document {name, description, dgp, plan} or a bare plan object"""
    seed = settings.DEFAULT_SEED if default_seed is None else default_seed
    if not isinstance(data, dict):
        raise PlanError(f"a plan must be a JSON object; got {data!r}")
    if 'plan' in data:
        if 'dgp' not in data:
            raise PlanError("scenario.dgp: required field is missing")
        merged = {**data['plan'], 'dgp': data['dgp'], 'name': data.get('name', '')}
        return SimPlan.from_dict(merged, default_seed=seed)
    return SimPlan.from_dict(data, default_seed=seed)


def load_scenario(name: str, directory: Optional[Path] = None, seed: Optional[int] = None) -> SimPlan:
    """Plan for a bundled scenario, matched on its name or file stem (case-insensitive)"""
    files = scenario_files(directory)
    for scenario, path in files.items():
        if name.lower() in (scenario.lower(), path.stem.lower()):
            return plan_from_document(_read_json(path), seed)
    raise UnknownScenarioError(name, sorted(files))


def load_suite(names: Optional[List[str]] = None, directory: Optional[Path] = None, seed: Optional[int] = None) -> List[SimPlan]:
    return [load_scenario(name, directory, seed) for name in (names or DEFAULT_SUITE)]


def load_plans(path: Path, seed: Optional[int] = None) -> List[SimPlan]:
    """Plans from a file holding one plan (or scenario) object or {"plans": [...]}"""
    data = _read_json(path)
    if isinstance(data, dict) and 'plans' in data:
        if not isinstance(data['plans'], list):
            raise PlanError(f"{path}: 'plans' must be a list")
        return [plan_from_document(item, seed) for item in data['plans']]
    return [plan_from_document(data, seed)]
