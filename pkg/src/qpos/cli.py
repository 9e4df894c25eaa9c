"""Command-line front end.

Commands: check, project, synthesize {single|subbundle|two-forms}, and
geometry {levi|zq|pipeline|bump|counterexample}.  Inputs and reports are
JSON; reports are written canonically (sorted keys, 17-significant-digit
floats) so a fixed seed yields byte-identical bytes run over run.  Exit
codes: 0 when every certificate/check passes, 2 on a certificate or check
failure, 1 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import metric_single, metric_subbundle, two_forms
from .errors import CertificateFailed, QposError, SchemaError
from .fields import FormField
from .geometry import (
    counterexample_build,
    counterexample_scan,
    domain_from_spec,
    levi_form,
    sample_boundary,
    standard_test_fields,
    unit_eigenvector_residuals,
    weight_bump,
    zq_check,
    zq_metric_pipeline,
)
from .hermitian import pencil_eigvalsh
from .riesz import Disc, riesz_projector
from .serialize import (
    certificate_to_json,
    load_field,
    load_matrix,
    matrix_to_json,
    metrics_from_json,
    metrics_to_json,
    write_report,
)

INERTIA_THRESHOLDS = (1e-8, 1e-10, 1e-12)


def _config_echo(args, **extra):
    cfg = {"command": args.command, "seed": getattr(args, "seed", None),
           "threads": getattr(args, "threads", None)}
    cfg.update(extra)
    return cfg


def _load_domain(path):
    with open(path) as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError(str(path), f"invalid JSON: {e}") from e
    return domain_from_spec(spec)


def _inertia_triple(M):
    lam = np.linalg.eigvalsh(M)
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    out = {}
    for thr in INERTIA_THRESHOLDS:
        t = thr * scale
        out[format(thr, ".0e")] = {
            "n_plus": int(np.sum(lam > t)),
            "n_minus": int(np.sum(lam < -t)),
            "n_zero": int(np.sum(np.abs(lam) <= t)),
        }
    return out


# ---------------------------------------------------------------- commands

def cmd_check(args):
    field = load_field(args.input)
    S = field.form_stack(args.form)
    if args.metric:
        with open(args.metric) as fh:
            table = metrics_from_json(json.load(fh), args.metric)
        G = np.stack([table[p.id] for p in field.points])
    else:
        G = field.g0_stack()
    lam = pencil_eigvalsh(S, G)
    sums = np.sum(lam[:, : args.q], axis=1)
    floors = 1e-9 * np.linalg.norm(S, axis=(1, 2))
    entries = []
    for i, p in enumerate(field.points):
        entries.append({
            "id": p.id,
            "min_sum": float(sums[i]),
            "margin": float(sums[i] - floors[i]),
            "inertia": _inertia_triple(S[i]),
        })
    passed = bool(np.all(sums > floors))
    if args.out:
        write_report(args.out, {
            "config": _config_echo(args, form=args.form, q=args.q),
            "passed": passed,
            "points": entries,
        })
    print(f"check: {'PASS' if passed else 'FAIL'} "
          f"({int(np.sum(sums <= floors))} of {len(field)} points below margin)")
    return 0 if passed else 2


def cmd_project(args):
    T = load_matrix(args.input)
    res = riesz_projector(T, Disc(center=args.center, radius=args.radius),
                          nodes=args.nodes)
    report = {
        "config": _config_echo(args, center=args.center, radius=args.radius,
                               nodes=args.nodes),
        "projector": matrix_to_json(res.matrix),
        "quad_nodes": res.quad_nodes,
        "separation": res.separation,
        "idempotency_defect": res.idempotency_defect,
        "hermiticity_defect": res.hermiticity_defect,
    }
    if args.out:
        write_report(args.out, report)
    print(f"project: separation {res.separation:.3e}, "
          f"idempotency defect {res.idempotency_defect:.3e}")
    return 0


def _write_cert_outputs(args, field: FormField, metrics, certs):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(_canonical_metrics(field, metrics))
    if args.cert:
        payload = {"certificates": {name: certificate_to_json(c)
                                    for name, c in certs.items()}}
        write_report(args.cert, payload)


def _canonical_metrics(field, metrics):
    from .serialize import dumps_canonical

    return dumps_canonical(metrics_to_json(field.ids, metrics))


def cmd_synthesize_single(args):
    field = load_field(args.input)
    metrics, cert = metric_single.synthesize_single(
        field, args.form, args.q, theta=args.margin)
    _write_cert_outputs(args, field, metrics, {args.form: cert})
    print(f"synthesize single: PASS (min margin {cert.min_margin():.3e})")
    return 0


def cmd_synthesize_subbundle(args):
    field = load_field(args.input)
    names = args.forms.split(",")
    metrics, certs, consts = metric_subbundle.synthesize_subbundle(
        field, names, args.q, safety=args.safety)
    _write_cert_outputs(args, field, metrics, certs)
    if args.report:
        write_report(args.report, {
            "config": _config_echo(args, forms=names, q=args.q, safety=args.safety),
            "constants": {name: {"A1": c.A1, "A2": c.A2, "A3": c.A3,
                                 "C": c.C, "kappa": c.kappa, "q": c.q}
                          for name, c in consts.items()},
        })
    kappa = next(iter(consts.values())).kappa
    print(f"synthesize subbundle: PASS (kappa {kappa:.6g})")
    return 0


def cmd_synthesize_two_forms(args):
    field = load_field(args.input)
    names = tuple(args.forms.split(","))
    if len(names) != 2:
        raise SchemaError("--forms", "two-forms synthesis needs exactly two names")
    metrics, certs, gammas, cont = two_forms.field_metric_top_degree(
        field, names, n_angles=args.angles, seed=args.seed)
    _write_cert_outputs(args, field, metrics, certs)
    if args.cert:
        payload = {
            "certificates": {name: certificate_to_json(c) for name, c in certs.items()},
            "gamma_points": [{"id": i, "gamma": g.tolist()}
                             for i, g in zip(field.ids, gammas)],
            "continuity": cont,
        }
        write_report(args.cert, payload)
    print("synthesize two-forms: PASS "
          f"(max gamma jump {cont.get('max_gamma_jump', 0.0):.3e})")
    return 0


def cmd_geometry_levi(args):
    domain = _load_domain(args.domain)
    samples = sample_boundary(domain, args.samples, seed=args.seed)
    entries = []
    for i, s in enumerate(samples):
        L = levi_form(domain, s)
        entries.append({
            "index": i,
            "chart": s.chart,
            "eigenvalues": np.linalg.eigvalsh(L).tolist(),
            "inertia": _inertia_triple(L),
        })
    if args.out:
        write_report(args.out, {"config": _config_echo(args, samples=args.samples),
                                "levi": entries})
    print(f"geometry levi: {len(samples)} samples")
    return 0


def cmd_geometry_zq(args):
    domain = _load_domain(args.domain)
    samples = sample_boundary(domain, args.samples, seed=args.seed)
    rep = zq_check(domain, args.q, samples)
    if args.out:
        write_report(args.out, {
            "config": _config_echo(args, q=args.q, samples=args.samples),
            "branch_per_sample": rep.branch.tolist(),
            "component_branch": {str(k): v for k, v in rep.component_branch.items()},
            "n_plus": rep.n_plus.tolist(),
            "n_minus": rep.n_minus.tolist(),
        })
    print(f"geometry zq: PASS (components: {rep.component_branch})")
    return 0


def cmd_geometry_pipeline(args):
    domain = _load_domain(args.domain)
    samples = sample_boundary(domain, args.samples, seed=args.seed)
    rep, metrics, certs = zq_metric_pipeline(domain, args.q, samples)
    ids = list(range(len(samples)))
    if args.out:
        with open(args.out, "w") as fh:
            from .serialize import dumps_canonical

            fh.write(dumps_canonical(metrics_to_json(ids, metrics)))
    if args.cert:
        write_report(args.cert, {
            "config": _config_echo(args, q=args.q, samples=args.samples),
            "certificates": {str(c): certificate_to_json(cert)
                             for c, cert in certs.items()},
        })
    print("geometry pipeline: PASS")
    return 0


def cmd_geometry_bump(args):
    domain = _load_domain(args.domain)
    samples = sample_boundary(domain, args.samples, seed=args.seed)
    rep = weight_bump(domain, args.q, samples, seed=args.seed)
    if args.out:
        write_report(args.out, {
            "config": _config_echo(args, q=args.q, samples=args.samples),
            "delta0": rep.delta0, "eta": (rep.eta if np.isfinite(rep.eta) else "inf"),
            "epsilon": rep.epsilon,
            "epsilon_bound": (rep.epsilon_bound if np.isfinite(rep.epsilon_bound)
                              else "inf"),
            "B1": rep.B1, "B2": rep.B2, "kappa": rep.kappa,
            "subbundle_constants": rep.subbundle_constants,
            "claim1_pass": rep.claim1_pass.tolist(),
            "claim2_min_sums": rep.claim2_min.tolist(),
            "claim3_min_sums": rep.claim3_min.tolist(),
            "trace_identity_max_err": rep.trace_identity_max_err,
            "large_eps_claim3_failures": rep.large_eps_claim3_failures,
            "all_claims_pass": rep.all_claims_pass,
        })
    ok = rep.all_claims_pass
    print(f"geometry bump: {'PASS' if ok else 'FAIL'} "
          f"(delta0 {rep.delta0:.4g}, epsilon {rep.epsilon:.4g})")
    return 0 if ok else 2


def cmd_geometry_counterexample(args):
    field = counterexample_build(R=args.radius, grid_n=args.grid)
    residual = float(np.max(unit_eigenvector_residuals(field)))
    results = []
    all_negative = True
    for name, v in standard_test_fields(args.radius):
        point, value = counterexample_scan(field, v)
        results.append({"field": name, "min_value": value,
                        "worst_point": point.tolist()})
        all_negative &= value < 0
    ok = all_negative and residual <= 1e-12
    if args.out:
        write_report(args.out, {
            "config": _config_echo(args, radius=args.radius, grid=args.grid),
            "unit_eigenvector_max_residual": residual,
            "scans": results,
            "all_fields_negative": all_negative,
        })
    print(f"geometry counterexample: {'PASS' if ok else 'FAIL'} "
          f"(max identity residual {residual:.2e})")
    return 0 if ok else 2


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpos", description=__doc__)
    p.add_argument("--seed", type=int, default=0, help="seed recorded in reports")
    p.add_argument("--threads", type=int, default=1,
                   help="recorded in reports; execution is numpy-vectorized")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="verify strict q-positivity of a form field")
    c.add_argument("--input", required=True)
    c.add_argument("--form", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--metric", help="per-point metrics JSON (default: g0/identity)")
    c.add_argument("--out")
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("project", help="Riesz spectral projector by quadrature")
    c.add_argument("--input", required=True)
    c.add_argument("--center", type=float, required=True)
    c.add_argument("--radius", type=float, required=True)
    c.add_argument("--nodes", type=int, default=64)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_project)

    syn = sub.add_parser("synthesize", help="metric synthesis").add_subparsers(
        dest="mode", required=True)

    c = syn.add_parser("single")
    c.add_argument("--input", required=True)
    c.add_argument("--form", default="S")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--margin", type=float, default=0.1)
    c.add_argument("--out")
    c.add_argument("--cert")
    c.set_defaults(fn=cmd_synthesize_single)

    c = syn.add_parser("subbundle")
    c.add_argument("--input", required=True)
    c.add_argument("--forms", required=True, help="comma-separated form names")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--safety", type=float, default=1.0)
    c.add_argument("--out")
    c.add_argument("--cert")
    c.add_argument("--report")
    c.set_defaults(fn=cmd_synthesize_subbundle)

    c = syn.add_parser("two-forms")
    c.add_argument("--input", required=True)
    c.add_argument("--forms", required=True)
    c.add_argument("--angles", type=int, default=512)
    c.add_argument("--out")
    c.add_argument("--cert")
    c.set_defaults(fn=cmd_synthesize_two_forms)

    geo = sub.add_parser("geometry", help="domain computations").add_subparsers(
        dest="mode", required=True)

    c = geo.add_parser("levi")
    c.add_argument("--domain", required=True)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_geometry_levi)

    c = geo.add_parser("zq")
    c.add_argument("--domain", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_geometry_zq)

    c = geo.add_parser("pipeline")
    c.add_argument("--domain", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--out")
    c.add_argument("--cert")
    c.set_defaults(fn=cmd_geometry_pipeline)

    c = geo.add_parser("bump")
    c.add_argument("--domain", required=True)
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_geometry_bump)

    c = geo.add_parser("counterexample")
    c.add_argument("--radius", type=float, default=2.0)
    c.add_argument("--grid", type=int, default=64)
    c.add_argument("--out")
    c.set_defaults(fn=cmd_geometry_counterexample)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SchemaError, FileNotFoundError, IsADirectoryError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return 1
    except CertificateFailed as e:
        ids = ", ".join(str(i) for i in e.failed_ids[:10])
        print(f"certificate failed: {e} (points: {ids})", file=sys.stderr)
        return 2
    except QposError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
