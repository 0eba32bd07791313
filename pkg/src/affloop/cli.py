"""Command-line surface: construct realizations, emit character tables, run
theorem verifications, serialize reports.

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid configuration,
3 internal assertion.  Reports are deterministic: identical configuration
and seed produce byte-identical JSON (keys sorted, fixed orderings), and
every report embeds the realization fingerprint.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .fields import (
    annihilation_report,
    commutator_sweep,
    delta_report,
    f_power_membership,
    irreducibility_probe,
    maximal_submodule_report,
    nilpotent_field_report,
    path_independence_check,
    standard_iff_report,
)
from .modules import HWModule, heisenberg_membership
from .twist import construct_realization

CHECKS = ("commutator26", "annihilate", "maximal", "standard-iff",
          "nilpotent-field", "f-power", "heisenberg", "delta",
          "irreducible-loop")


class ConfigError(Exception):
    pass


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"bad rational {text!r}") from exc


def _load_config_file(path: str) -> dict:
    out = {}
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith(("#", ";")):
                    continue
                if "=" not in line:
                    raise ConfigError(f"bad config line {line!r}")
                key, val = line.split("=", 1)
                out[key.strip().replace("_", "-")] = val.strip()
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    return out


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="affloop",
        description="Exact twisted affine Kac-Moody realizations and "
                    "annihilating-field verification.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--type", dest="type_label")
        p.add_argument("--case", type=int, choices=(1, 2, 3, 4, 5))
        p.add_argument("--untwisted", action="store_true")
        p.add_argument("--s", dest="s_vector",
                       help="comma-separated s-vector, e.g. 1,0")
        p.add_argument("--inner-h", dest="inner_h",
                       help="comma-separated beta_j(h) integers (j >= 1); "
                            "converted to the equivalent s-vector")
        p.add_argument("-k", "--level", type=int, default=1)
        p.add_argument("--weight", help="comma-separated labels "
                                        "Lambda(h_0..h_l)")
        p.add_argument("-D", "--depth", default="2",
                       help="depth bound in conformal units (rational)")
        p.add_argument("--weight-cap", default=None,
                       help="weight-window height cap (rational)")
        p.add_argument("--format", choices=("json", "tsv"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--config", default=None,
                       help="INI-style key=value file; flags win")

    p_construct = sub.add_parser("construct", help="build and validate a "
                                                   "realization")
    common(p_construct)

    p_char = sub.add_parser("characters", help="per-depth character table")
    common(p_char)
    p_char.add_argument("--verma-only", action="store_true",
                        help="Verma dims only (works for non-dominant "
                             "weights)")

    p_verify = sub.add_parser("verify", help="run a named theorem check")
    p_verify.add_argument("check", choices=CHECKS)
    common(p_verify)
    p_verify.add_argument("-m", type=int, default=8,
                          help="heisenberg power bound")
    p_verify.add_argument("--weight2", default=None,
                          help="non-dominant labels for standard-iff")
    p_verify.add_argument("--gen-index", type=int, default=None,
                          help="F_i index for f-power")
    return ap


def _apply_config_file(args):
    if not args.config:
        return
    file_vals = _load_config_file(args.config)
    mapping = {
        "type": "type_label", "case": "case", "untwisted": "untwisted",
        "s": "s_vector", "inner-h": "inner_h", "level": "level", "k": "level",
        "weight": "weight", "depth": "depth", "d": "depth",
        "weight-cap": "weight_cap", "format": "format", "seed": "seed",
        "out": "out", "m": "m", "weight2": "weight2",
        "gen-index": "gen_index",
    }
    for key, val in file_vals.items():
        attr = mapping.get(key)
        if attr is None:
            raise ConfigError(f"unknown config key {key!r}")
        if getattr(args, attr, None) in (None, False):
            if attr in ("case", "level", "seed", "m", "gen_index"):
                val = int(val)
            elif attr == "untwisted":
                val = val.lower() in ("1", "true", "yes")
            setattr(args, attr, val)


def _realization(args):
    if not args.type_label:
        raise ConfigError("--type is required")
    if args.untwisted and args.case:
        raise ConfigError("--case and --untwisted are exclusive")
    case = args.case if args.case else "untwisted"
    s = None
    if args.s_vector:
        s = tuple(int(x) for x in args.s_vector.split(","))
    try:
        real = construct_realization(args.type_label, case, s=None)
    except (ValueError, AssertionError) as exc:
        raise ConfigError(str(exc)) from exc
    if args.inner_h:
        if s is not None:
            raise ConfigError("--s and --inner-h are exclusive")
        cvals = [int(x) for x in args.inner_h.split(",")]
        if len(cvals) != real.ell:
            raise ConfigError(f"--inner-h needs {real.ell} integers")
        total = real.r * (real.marks[0] +
                          sum(c * a for c, a in
                              zip(cvals, real.marks[1:])))
        s0q = total // real.r - sum(c * a for c, a in
                                    zip(cvals, real.marks[1:]))
        s = (s0q,) + tuple(cvals)
    if s is not None and s != real.s:
        try:
            real = construct_realization(args.type_label, case, s=s)
        except (ValueError, AssertionError) as exc:
            raise ConfigError(str(exc)) from exc
    return real


def _depth_q(args, real) -> int:
    depth = _parse_fraction(args.depth)
    q = depth * real.T
    if q.denominator != 1 or q < 0:
        raise ConfigError(f"depth {args.depth} is not a multiple of 1/T")
    return int(q)


def _psi_cap(args, depth_q) -> Fraction:
    if args.weight_cap is not None:
        return _parse_fraction(args.weight_cap)
    return Fraction(2 * depth_q + 6)


def _labels(args, real, attr="weight"):
    raw = getattr(args, attr, None)
    if raw is None:
        # default: the fundamental-style weight of smallest positive level
        labels = [0] * (real.ell + 1)
        best = min(range(real.ell + 1), key=lambda j: real.comarks[j])
        labels[best] = 1
        lv = real.comarks[best]
        if args.level % lv == 0:
            labels[best] = args.level // lv
            return tuple(labels)
        raise ConfigError("supply --weight for this level")
    labels = tuple(_parse_fraction(x) for x in raw.split(","))
    if len(labels) != real.ell + 1:
        raise ConfigError(f"weight needs {real.ell + 1} labels")
    return labels


def _emit(args, payload) -> str:
    if args.format == "tsv":
        lines = payload.get("_tsv")
        text = "\n".join(lines) + "\n" if lines else _json_text(payload)
    else:
        payload = {k: v for k, v in payload.items() if k != "_tsv"}
        text = _json_text(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return text


def _json_text(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=1,
                      default=str) + "\n"


def cmd_construct(args) -> int:
    real = _realization(args)
    summary = real.validation_summary()
    payload = {"schema": 1, "command": "construct",
               "realization": real.to_json(),
               "fingerprint": real.fingerprint(),
               "validation": summary, "seed": args.seed}
    _emit(args, payload)
    return 0


def cmd_characters(args) -> int:
    real = _realization(args)
    depth_q = _depth_q(args, real)
    labels = _labels(args, real)
    psi = _psi_cap(args, depth_q)
    dominant = all(x.denominator == 1 and x >= 0 for x in labels)
    if args.verma_only or not dominant:
        M = HWModule(real, "verma", labels=labels, depth_q=depth_q)
        window = M.window_blocks(depth_q, psi)
        per_depth: dict = {}
        for key in window:
            per_depth[key[0]] = per_depth.get(key[0], 0) + \
                len(M.block_basis(key))
        rows = ["#depth_q/T\tdim_M"]
        for d in sorted(per_depth):
            rows.append(f"{d}/{real.T}\t{per_depth[d]}")
        payload = {"schema": 1, "command": "characters",
                   "fingerprint": real.fingerprint(), "mode": "verma-only",
                   "per_depth": {f"{d}/{real.T}": per_depth[d]
                                 for d in sorted(per_depth)},
                   "seed": args.seed, "_tsv": rows}
        _emit(args, payload)
        return 0
    rep = maximal_submodule_report(real, args.level, labels, depth_q, psi)
    rows = ["#depth_q/T\tdim_M\tdim_M1\tdim_L\toracles_agree"]
    for d_str, agg in rep["per_depth"].items():
        rows.append(f"{d_str}/{real.T}\t{agg['dim_M']}\t{agg['dim_M1']}\t"
                    f"{agg['dim_L']}\t{str(rep['all_blocks_match']).lower()}")
    payload = {"schema": 1, "command": "characters",
               "fingerprint": real.fingerprint(),
               "report": rep, "seed": args.seed, "_tsv": rows}
    _emit(args, payload)
    return 0 if rep["status"] == "pass" else 1


def cmd_verify(args) -> int:
    check = args.check
    if check == "heisenberg":
        results = {}
        ok = True
        for m in range(args.m + 1):
            member, witness = heisenberg_membership(m, bound=max(args.m, 10))
            ok = ok and member
            results[str(m)] = {"member": member,
                               "witness_terms": len(witness or {})}
        payload = {"schema": 1, "command": "verify", "check": check,
                   "results": results, "seed": args.seed,
                   "status": "pass" if ok else "fail"}
        _emit(args, payload)
        return 0 if ok else 1

    real = _realization(args)
    depth_q = _depth_q(args, real)
    psi = _psi_cap(args, depth_q)
    k = args.level
    if check == "delta":
        if real.case_id != "untwisted":
            raise ConfigError("delta check runs on the untwisted companion; "
                              "pass --untwisted")
        theta_co = real.rs.coroot_coords(real.rs.theta)
        h_coords = {i: Fraction(-c, 4) for i, c in enumerate(theta_co)}
        rep = delta_report(real, k, depth_q, h_coords,
                           powers=tuple(range(1, k + 2)))
    elif check == "commutator26":
        labels = _labels(args, real)
        rep = commutator_sweep(real, k, labels, depth_q, psi,
                               m_bound_q=2 * real.T)
    elif check == "annihilate":
        labels = _labels(args, real)
        rep = annihilation_report(real, k, labels, depth_q, psi)
    elif check == "maximal":
        labels = _labels(args, real)
        rep = maximal_submodule_report(real, k, labels, depth_q, psi)
    elif check == "standard-iff":
        labels = _labels(args, real)
        if args.weight2:
            bad = tuple(_parse_fraction(x) for x in args.weight2.split(","))
        else:
            bad = _default_nondominant(real, k)
        rep = standard_iff_report(real, k, labels, bad, depth_q, psi)
    elif check == "nilpotent-field":
        rep = nilpotent_field_report(real, k, real.rs.theta, depth_q, psi)
    elif check == "f-power":
        idx = args.gen_index
        indices = range(real.ell + 1) if idx is None else [idx]
        subs = {str(i): f_power_membership(real, k, i) for i in indices}
        ok = all(s["status"] == "pass" for s in subs.values())
        rep = {"per_generator": subs,
               "status": "pass" if ok else "fail"}
    elif check == "irreducible-loop":
        labels = _labels(args, real)
        wq = k * real.T
        rep = irreducibility_probe(real, k, labels, depth_q, psi,
                                   n_window_q=range(wq - 2 * real.T,
                                                    wq + 3 * real.T))
    else:
        raise ConfigError(f"unknown check {check!r}")
    payload = {"schema": 1, "command": "verify", "check": check,
               "fingerprint": real.fingerprint(), "report": rep,
               "seed": args.seed, "status": rep.get("status", "pass")}
    _emit(args, payload)
    return 0 if payload["status"] == "pass" else 1


def _default_nondominant(real, k):
    """A non-dominant weight of the requested positive integral level."""
    labels = [Fraction(0)] * (real.ell + 1)
    labels[0] = Fraction(k + real.comarks[1], real.comarks[0])
    labels[1] = Fraction(-1)
    if labels[0].denominator != 1:
        labels[0] = Fraction(k)
        labels[1] = Fraction(k * (1 - real.comarks[0]), real.comarks[1])
    level = sum(Fraction(c) * x for c, x in zip(real.comarks, labels))
    if level != k:
        raise ConfigError("could not build a non-dominant weight; "
                          "pass --weight2")
    return tuple(labels)


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        _apply_config_file(args)
        if args.command == "construct":
            return cmd_construct(args)
        if args.command == "characters":
            return cmd_characters(args)
        return cmd_verify(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except AssertionError as exc:
        sys.stderr.write(f"internal assertion failed: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
