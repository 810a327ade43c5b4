"""Command-line front door: run a task, inspect a crawl, compare policies,
replay a recorded trace.

Config resolution is layered: built-in defaults, then a JSON config file,
then flags; the MANGO_NAV_OUTPUT env var overrides the output directory
last. Unknown keys in the config file are errors. Exit codes: 0 ok,
1 config error, 2 fatal run error, 3 replay mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .bandit import BanditConfig
from .crawler import CrawlConfig
from .errors import ConfigError, MangoNavError
from .memory import MemoryStore
from .navigation import NavigationConfig
from .orchestrator import AdapterBundle, RunConfig, analyze_structure, run
from .ranking import Query, RankingConfig, StopwordKeyworder
from .simulate import (
    PolicySpec,
    ScriptedLexicalAgent,
    ScriptedReflector,
    SimBrowserEnv,
    SimFetcher,
    SimSearchClient,
    SyntheticSite,
    generate_site,
    run_comparison,
    standard_batch,
)

log = logging.getLogger("mango_nav")

DEFAULT_CONFIG: dict = {
    "query": None,
    "root_url": None,
    "budget": 10,
    "iterations": 10,
    "kappa": 3.0,
    "crawl_limit": 1000,
    "top_k_crawl": 10,
    "top_k_search": 10,
    "seed": 0,
    "agent": "scripted",
    "reflector": "scripted",
    "search": "scripted",
    "output_dir": "runs/latest",
    "site_fixture": None,
    "synthetic_site": None,
    "search_endpoint": None,
    "log_level": "warning",
}

_FLAG_KEYS = ("query", "root_url", "budget", "iterations", "kappa",
              "crawl_limit", "top_k_crawl", "top_k_search", "seed", "agent",
              "reflector", "search", "output_dir", "site_fixture",
              "search_endpoint", "log_level")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1 for usage errors, not argparse's 2
        raise ConfigError(message)


def parse_config(flag_values: dict, file_path: str | None) -> dict:
    """Layered resolution: defaults < file < flags < MANGO_NAV_OUTPUT."""
    effective = dict(DEFAULT_CONFIG)
    if file_path:
        try:
            data = json.loads(Path(file_path).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {file_path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        for key in data:
            if key not in DEFAULT_CONFIG:
                raise ConfigError(f"unknown config key {key!r} (from file)",
                                  key=key, layer="file")
        effective.update(data)
    for key, value in flag_values.items():
        if value is not None:
            effective[key] = value
    env_out = os.environ.get("MANGO_NAV_OUTPUT")
    if env_out:
        effective["output_dir"] = env_out
    return effective


def _load_site(effective: dict) -> SyntheticSite | None:
    spec = effective.get("synthetic_site")
    if spec:
        unknown = set(spec) - {"seed", "branching", "depth", "targets",
                               "distractor_density"}
        if unknown:
            raise ConfigError(f"unknown synthetic_site keys {sorted(unknown)}",
                              key="synthetic_site", layer="file")
        return generate_site(
            seed=spec["seed"], branching=spec["branching"], depth=spec["depth"],
            targets=spec.get("targets", 1),
            distractor_density=spec.get("distractor_density", 0.2))
    path = effective.get("site_fixture")
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read site fixture {path}: {exc}") from exc
        meta = data.get("meta", {})
        meta.setdefault("target_urls", set(meta.pop("targets", [])))
        return SyntheticSite.from_fixture(data, **meta)
    return None


def build_run_config(effective: dict) -> RunConfig:
    site = _load_site(effective)
    scripted_roles = [role for role in ("agent", "reflector", "search")
                      if effective[role] == "scripted"]
    if scripted_roles and site is None:
        raise ConfigError(
            "scripted adapters need a site: set synthetic_site or site_fixture")

    try:
        budget = int(effective["budget"])
        navigation = NavigationConfig(budget=budget)

        query_text = effective.get("query") or (site.query_text if site else None)
        if not query_text:
            raise ConfigError("query is required", key="query")
        root_url = effective.get("root_url") or (site.root_url if site else None)
        if not root_url:
            raise ConfigError("root_url is required", key="root_url")
        crawl_config = CrawlConfig(root_url=root_url,
                                   max_pages=int(effective["crawl_limit"]))

        if effective["agent"] == "scripted":
            agent = ScriptedLexicalAgent(site)
            fetcher = SimFetcher(site)
            env = SimBrowserEnv(site)
            keyworder = StopwordKeyworder()
        elif effective["agent"] == "live":
            from .live import FetcherBrowserEnv, LiveFetcher, LlmAgent, \
                LlmClient, LlmKeyworder
            client = LlmClient()
            agent = LlmAgent(client)
            fetcher = LiveFetcher(timeout=crawl_config.per_page_fetch_timeout)
            env = FetcherBrowserEnv(
                LiveFetcher(timeout=crawl_config.per_page_fetch_timeout))
            keyworder = LlmKeyworder(client)
        else:
            raise ConfigError(f"agent must be scripted or live, got "
                              f"{effective['agent']!r}", key="agent")

        if effective["reflector"] == "scripted":
            reflector = ScriptedReflector(site, horizon=budget)
        elif effective["reflector"] == "live":
            from .live import LlmClient, LlmReflector
            reflector = LlmReflector(LlmClient())
        else:
            raise ConfigError("reflector must be scripted or live",
                              key="reflector")

        if effective["search"] == "scripted":
            search = SimSearchClient(site)
        elif effective["search"] == "live":
            from .live import HttpSearchClient
            endpoint = effective.get("search_endpoint") or \
                os.environ.get("MANGO_NAV_SEARCH_ENDPOINT")
            if not endpoint:
                raise ConfigError("live search needs search_endpoint",
                                  key="search_endpoint")
            search = HttpSearchClient(endpoint)
        elif effective["search"] == "none":
            search = None
        else:
            raise ConfigError("search must be scripted, live or none",
                              key="search")

        return RunConfig(
            query=Query(query_text),
            root_url=root_url,
            adapters=AdapterBundle(agent=agent, reflector=reflector,
                                   keyworder=keyworder, fetcher=fetcher,
                                   env=env, search=search),
            max_iterations=int(effective["iterations"]),
            search_top_k=int(effective["top_k_search"]),
            navigation=navigation,
            crawl=crawl_config,
            ranking=RankingConfig(top_k=int(effective["top_k_crawl"])),
            bandit=BanditConfig(kappa=float(effective["kappa"]),
                                rng_seed=int(effective["seed"])),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _write_run_dir(run_dir: Path, effective: dict, result) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    with open(run_dir / "events.jsonl", "w", encoding="utf-8") as fh:
        for event in result.events:
            fh.write(event.to_line() + "\n")
    with open(run_dir / "bandit_snapshots.jsonl", "w", encoding="utf-8") as fh:
        for snap in result.arm_snapshots:
            fh.write(json.dumps(snap, ensure_ascii=False,
                                separators=(",", ":")) + "\n")
    with open(run_dir / "run.json", "w", encoding="utf-8") as fh:
        json.dump({"config": effective, "result": result.to_dict()}, fh,
                  ensure_ascii=False, indent=2)
        fh.write("\n")


def cmd_run(effective: dict) -> int:
    config = build_run_config(effective)
    run_dir = Path(effective["output_dir"])
    run_dir.mkdir(parents=True, exist_ok=True)
    memory_path = run_dir / "memory.jsonl"
    if memory_path.exists():
        memory_path.unlink()
    result = run(config, memory=MemoryStore(path=memory_path))
    memory_path.touch(exist_ok=True)  # the layout always has all four files
    _write_run_dir(run_dir, effective, result)
    print(f"{result.status}: answer={result.answer!r} source={result.source!r} "
          f"iterations={result.iterations_used} actions={result.total_actions}")
    print(f"run directory: {run_dir}")
    return 0


def cmd_crawl(effective: dict) -> int:
    config = build_run_config(effective)
    candidates = analyze_structure(config)
    print(f"{'url':<58} {'lambda':>10} {'rho':>8}  provenance")
    for s in candidates.arms_input:
        print(f"{s.url:<58} {s.lam:>10.4f} {s.rho:>8.4f}  {s.provenance}")
    return 0


def cmd_simulate(effective: dict, tasks: int, policies_csv: str,
                 base_seed: int) -> int:
    names = [name.strip() for name in policies_csv.split(",") if name.strip()]
    policies = [PolicySpec(name) for name in names]
    sites, seeds = standard_batch(tasks, base_seed=base_seed)
    report = run_comparison(policies, sites, seeds)
    out_dir = Path(effective["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    print(report.to_text_table())
    print(f"report written to {out_dir / 'report.json'}")
    return 0


def cmd_replay(run_dir_path: str) -> int:
    run_dir = Path(run_dir_path)
    run_json = run_dir / "run.json"
    events_path = run_dir / "events.jsonl"
    if not run_json.exists() or not events_path.exists():
        raise ConfigError(f"{run_dir} is not a run directory "
                          "(missing run.json or events.jsonl)")
    recorded = events_path.read_text(encoding="utf-8").splitlines()
    effective = json.loads(run_json.read_text(encoding="utf-8"))["config"]
    config = build_run_config(effective)
    result = run(config, memory=MemoryStore())
    fresh = [event.to_line() for event in result.events]
    for i, (want, got) in enumerate(zip(recorded, fresh)):
        if want != got:
            print(f"replay mismatch: first divergence at event {i}")
            print(f"  recorded: {want}")
            print(f"  replayed: {got}")
            return 3
    if len(recorded) != len(fresh):
        print(f"replay mismatch: recorded {len(recorded)} events, "
              f"replayed {len(fresh)}")
        return 3
    print(f"replay ok: {len(fresh)} events identical")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="mango-nav",
                     description="Budget-constrained web navigation engine")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--query")
        p.add_argument("--root-url", dest="root_url")
        p.add_argument("--budget", type=int)
        p.add_argument("--iterations", type=int)
        p.add_argument("--kappa", type=float)
        p.add_argument("--crawl-limit", dest="crawl_limit", type=int)
        p.add_argument("--top-k-crawl", dest="top_k_crawl", type=int)
        p.add_argument("--top-k-search", dest="top_k_search", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--agent", choices=["scripted", "live"])
        p.add_argument("--reflector", choices=["scripted", "live"])
        p.add_argument("--search", choices=["scripted", "live", "none"])
        p.add_argument("--output-dir", dest="output_dir")
        p.add_argument("--site-fixture", dest="site_fixture")
        p.add_argument("--search-endpoint", dest="search_endpoint")
        p.add_argument("--log-level", dest="log_level")

    add_common(sub.add_parser("run", help="execute one navigation task"))
    add_common(sub.add_parser("crawl",
                              help="structure analysis only: print candidates"))
    sim = sub.add_parser("simulate", help="policy comparison on synthetic tasks")
    add_common(sim)
    sim.add_argument("--tasks", type=int, default=200)
    sim.add_argument("--policies",
                     default="mango,random,google_only,greedy,no_memory")
    sim.add_argument("--base-seed", dest="base_seed", type=int, default=9000)
    rep = sub.add_parser("replay", help="re-execute a recorded run and diff")
    rep.add_argument("--run-dir", dest="run_dir", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "replay":
            return cmd_replay(args.run_dir)
        flag_values = {key: getattr(args, key, None) for key in _FLAG_KEYS}
        effective = parse_config(flag_values, args.config)
        logging.basicConfig(
            level=getattr(logging, str(effective["log_level"]).upper(),
                          logging.WARNING))
        if args.command == "run":
            return cmd_run(effective)
        if args.command == "crawl":
            return cmd_crawl(effective)
        if args.command == "simulate":
            return cmd_simulate(effective, args.tasks, args.policies,
                                args.base_seed)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except MangoNavError as exc:
        print(f"fatal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
