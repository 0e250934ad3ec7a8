"""Benchmark enumeration, suite execution, result persistence, aggregation.

Results are JSONL, one record per (instance, agent, replicate), appended as
runs finish so an interrupted suite can resume by skipping ids already on
disk. Replay seeds are derived from everything the agents can actually see
(grid identity, action set, replicate) and deliberately not from the carry
limit or step cost, so runs are paired across those control arms.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import agents as agents_mod
from .env import Action, ActionSet, ConstraintSet, run_episode
from .generate import (
    DistributionKind,
    Grid,
    StartMode,
    build_benchmark,
    generate_grid,
    grid_from_dict,
    grid_seed,
    grid_to_dict,
)
from .llm import ActionPlan, LlmClientError, build_prompt, parse_plan, query_model
from .rng import derive_seed
from .textgrid import render

_AGENT_DOMAIN = 3

CARRY_LIMITS = (None, 2)
STEP_COSTS = (0.0, 0.3)


@dataclass(frozen=True)
class InstanceId:
    """One benchmark instance: a grid identity plus a constraint combo."""

    distribution: DistributionKind
    has_obstacles: bool
    start_mode: StartMode
    grid_index: int
    action_set: ActionSet
    carry_limit: int | None
    step_cost: float

    def to_str(self) -> str:
        return (
            f"dist={self.distribution.value}"
            f"/obs={1 if self.has_obstacles else 0}"
            f"/start={'in' if self.start_mode is StartMode.INNER else 'out'}"
            f"/g={self.grid_index}"
            f"/mu={1 if self.action_set is ActionSet.MU1 else 2}"
            f"/lim={self.carry_limit or 0}"
            f"/cost={'0.3' if self.step_cost else '0'}"
        )

    @classmethod
    def from_str(cls, text: str) -> "InstanceId":
        fields = dict(part.split("=", 1) for part in text.split("/"))
        return cls(
            distribution=DistributionKind(fields["dist"]),
            has_obstacles=fields["obs"] == "1",
            start_mode=StartMode.INNER if fields["start"] == "in" else StartMode.OUTER,
            grid_index=int(fields["g"]),
            action_set=ActionSet.MU1 if fields["mu"] == "1" else ActionSet.MU2,
            carry_limit=None if fields["lim"] == "0" else int(fields["lim"]),
            step_cost=float(fields["cost"]),
        )

    def constraints(self) -> ConstraintSet:
        return ConstraintSet(
            action_set=self.action_set,
            carry_limit=self.carry_limit,
            step_cost=self.step_cost,
        )


def enumerate_instances(index_lo: int = 0, index_hi: int = 99) -> list[InstanceId]:
    """All instances whose grid index lies in [index_lo, index_hi]."""
    if not (0 <= index_lo <= index_hi <= 99):
        raise ValueError(f"invalid grid index range {index_lo}..{index_hi}")
    instances = []
    for kind in DistributionKind:
        for has_obstacles in (False, True):
            for start_mode in (StartMode.INNER, StartMode.OUTER):
                for index in range(index_lo, index_hi + 1):
                    for action_set in (ActionSet.MU1, ActionSet.MU2):
                        for limit in CARRY_LIMITS:
                            for cost in STEP_COSTS:
                                instances.append(
                                    InstanceId(
                                        distribution=kind,
                                        has_obstacles=has_obstacles,
                                        start_mode=start_mode,
                                        grid_index=index,
                                        action_set=action_set,
                                        carry_limit=limit,
                                        step_cost=cost,
                                    )
                                )
    return instances


class Benchmark:
    """Grid provider, either generated on demand from a master seed or
    loaded lazily from a directory written by ``write_benchmark``."""

    def __init__(self, master_seed: int | None = None, root: str | None = None):
        if (master_seed is None) == (root is None):
            raise ValueError("pass exactly one of master_seed or root")
        self.master_seed = master_seed
        self.root = root
        self._cache: dict[tuple, Grid] = {}
        self._manifest = None
        if root is not None:
            with open(os.path.join(root, "manifest.json"), encoding="utf-8") as handle:
                self._manifest = json.load(handle)

    @classmethod
    def from_seed(cls, master_seed: int) -> "Benchmark":
        return cls(master_seed=master_seed)

    @classmethod
    def from_dir(cls, root: str) -> "Benchmark":
        return cls(root=root)

    def grid(self, instance: InstanceId) -> Grid:
        key = (
            instance.distribution,
            instance.has_obstacles,
            instance.start_mode,
            instance.grid_index,
        )
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if self.root is None:
            seed = grid_seed(self.master_seed, *key)
            grid = generate_grid(*key, seed)
        else:
            if instance.grid_index >= self._manifest["per_combo"]:
                raise ValueError(
                    f"benchmark at {self.root!r} holds {self._manifest['per_combo']} "
                    f"grids per combination, index {instance.grid_index} not built"
                )
            path = os.path.join(self.root, grid_rel_path(*key) + ".json")
            with open(path, encoding="utf-8") as handle:
                grid = grid_from_dict(json.load(handle))
        self._cache[key] = grid
        return grid


def grid_rel_path(
    kind: DistributionKind,
    has_obstacles: bool,
    start_mode: StartMode,
    index: int,
) -> str:
    return os.path.join(
        "grids",
        kind.value,
        f"obs{1 if has_obstacles else 0}",
        start_mode.value,
        f"{index:03d}",
    )


def write_benchmark(
    out_dir: str, master_seed: int, per_combo: int = 100, force: bool = False
) -> dict:
    """Write every grid as a JSON + text pair plus a manifest; returns the
    manifest. Fails on a non-empty target unless forced."""
    if os.path.isdir(out_dir) and os.listdir(out_dir) and not force:
        raise FileExistsError(f"output directory {out_dir!r} is not empty (use force)")
    grids = build_benchmark(master_seed, per_combo=per_combo)
    entries = []
    hasher = hashlib.sha256()
    for grid in grids:
        spec = grid.spec
        rel = grid_rel_path(
            spec.distribution, spec.has_obstacles, spec.start_mode, spec.grid_index
        )
        path = os.path.join(out_dir, rel)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path + ".json", "w", encoding="utf-8") as handle:
            json.dump(grid_to_dict(grid), handle, indent=1, sort_keys=True)
        text = render(grid)
        with open(path + ".txt", "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        hasher.update(text.encode("utf-8"))
        entries.append({"id": spec.grid_id, "seed": spec.seed, "path": rel})
    manifest = {
        "master_seed": master_seed,
        "per_combo": per_combo,
        "count": len(grids),
        "content_hash": hasher.hexdigest(),
        "grids": entries,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=1, sort_keys=True)
    return manifest


@dataclass
class RunRecord:
    """One scored (or failed) episode, as persisted to results JSONL."""

    instance_id: str
    agent: str
    seed: int
    replicate: int
    status: str  # "scored" | "unscored"
    length: int | None = None
    score: float | None = None
    energy_at_start: int | None = None
    final_pos: tuple[int, int] | None = None
    trace_path: str | None = None
    error: str | None = None
    started_at: str | None = None
    finished_at: str | None = None

    def key(self) -> tuple[str, str, int]:
        return (self.instance_id, self.agent, self.replicate)

    def to_dict(self) -> dict:
        out = {
            "instance_id": self.instance_id,
            "agent": self.agent,
            "seed": self.seed,
            "replicate": self.replicate,
            "status": self.status,
            "length": self.length,
            "score": self.score,
            "energy_at_start": self.energy_at_start,
            "final_pos": list(self.final_pos) if self.final_pos else None,
            "trace_path": self.trace_path,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        final_pos = data.get("final_pos")
        return cls(
            instance_id=data["instance_id"],
            agent=data["agent"],
            seed=int(data["seed"]),
            replicate=int(data["replicate"]),
            status=data["status"],
            length=data.get("length"),
            score=data.get("score"),
            energy_at_start=data.get("energy_at_start"),
            final_pos=tuple(final_pos) if final_pos else None,
            trace_path=data.get("trace_path"),
            error=data.get("error"),
            started_at=data.get("started_at"),
            finished_at=data.get("finished_at"),
        )


def record_seed(suite_seed: int, instance: InstanceId, replicate: int) -> int:
    """Replay seed for one record; carry limit and step cost are left out so
    the same plan is evaluated across those arms."""
    kinds = list(DistributionKind)
    return derive_seed(
        _AGENT_DOMAIN,
        suite_seed,
        kinds.index(instance.distribution),
        1 if instance.has_obstacles else 0,
        0 if instance.start_mode is StartMode.INNER else 1,
        instance.grid_index,
        1 if instance.action_set is ActionSet.MU1 else 2,
        replicate,
    )


def parse_agent(spec: str) -> tuple[str, str | None]:
    """Split an agent spec into (kind, model): baselines or "llm:<model>"."""
    if spec in (agents_mod.RANDOM_WALK, agents_mod.GREEDY):
        return (spec, None)
    if spec.startswith("llm:") and len(spec) > 4:
        return ("llm", spec[4:])
    raise ValueError(f"unknown agent spec: {spec!r}")


def _trace_filename(record: RunRecord) -> str:
    flat = record.instance_id.replace("/", "_")
    agent = record.agent.replace("/", "_").replace(":", "-")
    return f"{agent}__{flat}__r{record.replicate}.json"


def write_trace(
    traces_dir: str,
    record: RunRecord,
    instance: InstanceId,
    result,
    plan: ActionPlan | None = None,
) -> str:
    os.makedirs(traces_dir, exist_ok=True)
    name = _trace_filename(record)
    payload = {
        "instance_id": record.instance_id,
        "constraints": instance.constraints().to_dict(),
        "agent": record.agent,
        "seed": record.seed,
        "actions": [action.value for action, _ in result.trace],
        "effects": [effect.value for _, effect in result.trace],
        "length": result.length,
        "score": result.score,
        "energy_at_start": result.energy_at_start,
        "final_pos": list(result.final_pos),
    }
    if plan is not None:
        payload["raw_response"] = plan.raw_response
        payload["parse_notes"] = [list(note) for note in plan.parse_notes]
    with open(os.path.join(traces_dir, name), "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=1)
    return name


def _now() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())


def run_one(
    benchmark: Benchmark,
    agent_spec: str,
    instance: InstanceId,
    replicate: int,
    suite_seed: int,
    resample_invalid: bool = False,
    client=None,
) -> tuple[RunRecord, object, ActionPlan | None]:
    """Execute one instance for one agent; never raises for LLM transport
    failures, which come back as unscored records."""
    kind, model = parse_agent(agent_spec)
    seed = record_seed(suite_seed, instance, replicate)
    grid = benchmark.grid(instance)
    constraints = instance.constraints()
    started = _now()
    plan = None
    if kind == "llm":
        if client is None:
            raise ValueError("an LLM agent needs a client (endpoint or cassette)")
        bundle = build_prompt(grid, constraints, model=model)
        try:
            raw = query_model(bundle, client)
        except LlmClientError as exc:
            record = RunRecord(
                instance_id=instance.to_str(),
                agent=agent_spec,
                seed=seed,
                replicate=replicate,
                status="unscored",
                error=f"{instance.to_str()}: {exc}",
                started_at=started,
                finished_at=_now(),
            )
            return (record, None, None)
        plan = parse_plan(raw)
        result = run_episode(grid, constraints, plan.actions)
    else:
        result = agents_mod.run_baseline(
            kind, grid, constraints, seed, resample_invalid=resample_invalid
        )
    record = RunRecord(
        instance_id=instance.to_str(),
        agent=agent_spec,
        seed=seed,
        replicate=replicate,
        status="scored",
        length=result.length,
        score=result.score,
        energy_at_start=result.energy_at_start,
        final_pos=result.final_pos,
        started_at=started,
        finished_at=_now(),
    )
    return (record, result, plan)


def load_records(path: str) -> list[RunRecord]:
    records = []
    if not os.path.exists(path):
        return records
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(RunRecord.from_dict(json.loads(line)))
    return records


def run_suite(
    benchmark: Benchmark,
    agent_spec: str,
    out_path: str,
    index_lo: int = 0,
    index_hi: int = 99,
    replicates: int = 1,
    suite_seed: int = 0,
    workers: int = 1,
    resample_invalid: bool = False,
    client=None,
    write_traces: bool = True,
    config_echo: dict | None = None,
) -> dict:
    """Run an agent over every instance in the subset, appending one record
    per (instance, replicate) and skipping records already present."""
    instances = enumerate_instances(index_lo, index_hi)
    existing = {record.key() for record in load_records(out_path)}
    pending = [
        (instance, replicate)
        for instance in instances
        for replicate in range(replicates)
        if (instance.to_str(), agent_spec, replicate) not in existing
    ]
    traces_dir = os.path.join(os.path.dirname(out_path) or ".", "traces")
    os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)

    meta = {
        "agent": agent_spec,
        "subset": [index_lo, index_hi],
        "replicates": replicates,
        "suite_seed": suite_seed,
        "workers": workers,
        "resample_invalid": resample_invalid,
        "write_traces": write_traces,
    }
    if config_echo:
        meta.update(config_echo)
    meta_path = out_path + ".meta.json"
    with open(meta_path, "w", encoding="utf-8") as handle:
        json.dump(meta, handle, indent=1, sort_keys=True)

    def work(item):
        instance, replicate = item
        return instance, run_one(
            benchmark,
            agent_spec,
            instance,
            replicate,
            suite_seed,
            resample_invalid=resample_invalid,
            client=client,
        )

    scored = unscored = 0
    with open(out_path, "a", encoding="utf-8") as out:
        if workers > 1:
            executor = ThreadPoolExecutor(max_workers=workers)
            outcomes = executor.map(work, pending)
        else:
            executor = None
            outcomes = map(work, pending)
        try:
            for instance, (record, result, plan) in outcomes:
                if record.status == "scored":
                    scored += 1
                    if write_traces:
                        record.trace_path = os.path.join(
                            "traces", write_trace(traces_dir, record, instance, result, plan)
                        )
                else:
                    unscored += 1
                out.write(json.dumps(record.to_dict()) + "\n")
        finally:
            if executor is not None:
                executor.shutdown()
    return {
        "instances": len(instances),
        "requested": len(instances) * replicates,
        "skipped_existing": len(instances) * replicates - len(pending),
        "scored": scored,
        "unscored": unscored,
        "out_path": out_path,
        "meta_path": meta_path,
    }


# --- aggregation ---------------------------------------------------------

CONTROLS: list[tuple[str, str]] = [
    ("distribution", "Energy Distribution"),
    ("obstacle", "Obstacle"),
    ("start", "Starting Position"),
    ("action-set", "Movement-related Action Set"),
    ("carry-limit", "Energy Carrying Limit"),
    ("step-cost", "Energy Cost Per Step"),
]

_DIST_LABELS = {
    DistributionKind.RANDOM: "Random",
    DistributionKind.VERTICAL_SKEW: "Vertically-skewed",
    DistributionKind.HORIZONTAL_SKEW: "Horizontally-skewed",
    DistributionKind.CLUSTER: "Cluster",
    DistributionKind.SPIRAL: "Spiral",
}


def control_value(control: str, instance: InstanceId) -> str:
    if control == "distribution":
        return _DIST_LABELS[instance.distribution]
    if control == "obstacle":
        return "Yes" if instance.has_obstacles else "No"
    if control == "start":
        return "Inner Position" if instance.start_mode is StartMode.INNER else "Outer Position"
    if control == "action-set":
        return "mu1" if instance.action_set is ActionSet.MU1 else "mu2"
    if control == "carry-limit":
        return "No Limit" if instance.carry_limit is None else f"{instance.carry_limit} Units"
    if control == "step-cost":
        return "0.3 Unit" if instance.step_cost else "0 Unit"
    if control == "average":
        return "Average"
    raise ValueError(f"unknown control: {control!r}")


def control_values(control: str) -> list[str]:
    if control == "distribution":
        return [_DIST_LABELS[kind] for kind in DistributionKind]
    if control == "obstacle":
        return ["Yes", "No"]
    if control == "start":
        return ["Inner Position", "Outer Position"]
    if control == "action-set":
        return ["mu1", "mu2"]
    if control == "carry-limit":
        return ["No Limit", "2 Units"]
    if control == "step-cost":
        return ["0 Unit", "0.3 Unit"]
    if control == "average":
        return ["Average"]
    raise ValueError(f"unknown control: {control!r}")


@dataclass
class AgentStats:
    n: int
    mean_length: float
    mean_energy: float
    stderr_energy: float
    is_max_energy: bool = False
    is_min_energy: bool = False


@dataclass
class AggregateRow:
    control: str
    value: str
    per_agent: dict[str, AgentStats]
    unscored: dict[str, int]


def _stats(records: list[RunRecord]) -> AgentStats | None:
    if not records:
        return None
    n = len(records)
    lengths = [record.length for record in records]
    energies = [record.score for record in records]
    # fsum keeps every cell independent of record order
    mean_energy = math.fsum(energies) / n
    if n > 1:
        var = math.fsum((e - mean_energy) ** 2 for e in energies) / (n - 1)
        stderr = (var / n) ** 0.5
    else:
        stderr = 0.0
    return AgentStats(
        n=n,
        mean_length=math.fsum(lengths) / n,
        mean_energy=mean_energy,
        stderr_energy=stderr,
    )


def aggregate(records: list[RunRecord], controls: list[str] | None = None) -> list[AggregateRow]:
    """Group scored records by control values and average length and energy.

    A pure fold over the records: shuffling their order never changes a cell.
    Unscored records are excluded from the means and counted per agent.
    """
    if controls is None:
        controls = [name for name, _ in CONTROLS] + ["average"]
    agents = sorted({record.agent for record in records})
    parsed = [(record, InstanceId.from_str(record.instance_id)) for record in records]
    rows = []
    for control in controls:
        for value in control_values(control):
            per_agent = {}
            unscored = {}
            for agent in agents:
                matching = [
                    record
                    for record, instance in parsed
                    if record.agent == agent
                    and control_value(control, instance) == value
                ]
                scored = [r for r in matching if r.status == "scored"]
                unscored[agent] = len(matching) - len(scored)
                stats = _stats(scored)
                if stats is not None:
                    per_agent[agent] = stats
            energies = {a: s.mean_energy for a, s in per_agent.items()}
            if len(energies) > 1:
                top = max(energies.values())
                bottom = min(energies.values())
                for agent, stats in per_agent.items():
                    stats.is_max_energy = stats.mean_energy == top
                    stats.is_min_energy = stats.mean_energy == bottom
            rows.append(
                AggregateRow(control=control, value=value, per_agent=per_agent, unscored=unscored)
            )
    return rows


def format_table(rows: list[AggregateRow]) -> str:
    """Aligned text table: one line per control value, Length and Energy per
    agent; in multi-agent tables the row's best energy is marked with ``*``
    and the worst with ``!``."""
    agents = sorted({agent for row in rows for agent in row.per_agent})
    headers = ["Control", "Value"]
    for agent in agents:
        headers.append(f"{agent} Length")
        headers.append(f"{agent} Energy")
    control_titles = dict(CONTROLS)
    control_titles["average"] = ""
    table = [headers]
    for row in rows:
        line = [control_titles.get(row.control, row.control), row.value]
        for agent in agents:
            stats = row.per_agent.get(agent)
            if stats is None:
                line.extend(["-", "-"])
                continue
            mark = ""
            if stats.is_max_energy:
                mark = "*"
            elif stats.is_min_energy:
                mark = "!"
            line.append(f"{stats.mean_length:.2f}")
            line.append(f"{stats.mean_energy:.2f}{mark}")
        table.append(line)
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]
    lines = []
    for idx, row in enumerate(table):
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def write_aggregates_csv(rows: list[AggregateRow], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "control",
                "value",
                "agent",
                "n",
                "unscored",
                "mean_length",
                "mean_energy",
                "stderr_energy",
                "is_max_energy",
                "is_min_energy",
            ]
        )
        for row in rows:
            for agent in sorted(row.per_agent):
                stats = row.per_agent[agent]
                writer.writerow(
                    [
                        row.control,
                        row.value,
                        agent,
                        stats.n,
                        row.unscored.get(agent, 0),
                        f"{stats.mean_length:.4f}",
                        f"{stats.mean_energy:.4f}",
                        f"{stats.stderr_energy:.4f}",
                        int(stats.is_max_energy),
                        int(stats.is_min_energy),
                    ]
                )


def rescore_trace(trace: dict, grid: Grid) -> float:
    """Replay a persisted trace against its grid and return the score."""
    constraints = ConstraintSet.from_dict(trace["constraints"])
    plan = [Action(a) for a in trace["actions"]]
    result = run_episode(grid, constraints, plan)
    if [e.value for _, e in result.trace] != trace["effects"]:
        raise ValueError("trace effects do not replay on this grid")
    return result.score
