"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 invalid input, 3 infeasible
request. Errors are reported as one JSON object on stderr; data goes to
stdout or ``--out``.
"""
import argparse
import json
import sys

from . import io
from .bases import state_basis
from .channels import identity_channel
from .dilation import dilation_for_target_gluing, gluing_of_dilation, zero_visibility_dilation
from .errors import InfeasibleError, InputError, ParseError
from .gluing import extend_occupation, glue
from .interferometer import (
    default_chis,
    fringe,
    interference_pipeline,
    visibility_measures,
)
from .tomography import reconstruct_R, recover_C_generalized, recover_C_standard


def _load(path, decoder):
    if path is None:
        raise ParseError("missing required input file")
    return decoder(io.load_json(path))


def _parse_vector(text):
    try:
        return io.decode_array(json.loads(text), 1, "vector")
    except json.JSONDecodeError as exc:
        raise ParseError(f"bad vector literal: {exc}") from exc


def _glued_from_args(args):
    if getattr(args, "dilation", None):
        dil = io.dilation_from_json(io.load_json(args.dilation), verify=True)
        return glue(dil.channel, identity_channel(dil.system_dim), gluing_of_dilation(dil))
    phi1 = _load(args.phi1, io.channel_from_json)
    phi2 = _load(args.phi2, io.channel_from_json)
    gluing = _load(args.gluing, io.gluing_from_json)
    return glue(phi1, phi2, gluing)


def cmd_fringe(args):
    glued = _glued_from_args(args)
    rho = _load(args.state, io.state_from_json)
    report = fringe(glued, rho, default_chis(args.chi_steps))
    return io.fringe_csv(report)


def cmd_tomography(args):
    glued = _glued_from_args(args)
    phi1, phi2 = glued.phi1, glued.phi2
    if args.mode == "standard":
        data = [(rho, interference_pipeline(glued, rho)) for rho in state_basis(glued.source_dim)]
        result = recover_C_standard(reconstruct_R(data), phi1, phi2)
    else:
        def oracle(u, rho):
            return interference_pipeline(glued, rho, u=u)

        result = recover_C_generalized(oracle, phi1, phi2, tol=args.tol or 1e-8)
    return io.dumps(io.tomography_to_json(result))


def cmd_dilate(args):
    channel = _load(args.phi1, io.channel_from_json)
    if args.zero_visibility:
        dil = zero_visibility_dilation(channel)
    else:
        if args.target is None:
            raise ParseError("give --target or --zero-visibility")
        target = _parse_vector(args.target)
        ancilla = args.ancilla_dim if args.ancilla_dim is not None else target.size + 1
        mode = args.mode or "deterministic"
        dil = dilation_for_target_gluing(channel, target, ancilla, mode=mode, seed=args.seed)
    if args.verify:
        dil.verify(args.tol or 1e-10)
    return io.dumps(io.dilation_to_json(dil))


def cmd_measures(args):
    glued = _glued_from_args(args)
    m = visibility_measures(glued, seed=args.seed)
    return io.dumps({"A": m.A, "B": m.B, "F_c": m.F_c})


def cmd_extend(args):
    channel = _load(args.phi1, io.channel_from_json)
    if args.c1 is not None:
        c1 = _parse_vector(args.c1)
    else:
        gluing = _load(args.gluing, io.gluing_from_json)
        if not gluing.is_lsp:
            raise ParseError("gluing file has no lsp factors; pass --c1")
        c1 = gluing.lsp_factors[0]
    return io.dumps(io.channel_to_json(extend_occupation(channel, c1)))


def cmd_validate(args):
    checks = [
        ("phi1", args.phi1, io.channel_from_json),
        ("phi2", args.phi2, io.channel_from_json),
        ("gluing", args.gluing, io.gluing_from_json),
        ("state", args.state, io.state_from_json),
        ("dilation", args.dilation, lambda obj: io.dilation_from_json(obj, verify=True)),
    ]
    report = {}
    for name, path, decoder in checks:
        if path is None:
            continue
        try:
            _load(path, decoder)
            report[name] = {"valid": True}
        except (InputError, InfeasibleError, OSError) as exc:
            report[name] = {"valid": False, "error": type(exc).__name__, "message": str(exc)}
    if not report:
        raise ParseError("nothing to validate")
    if args.phi1 and args.phi2 and args.gluing and all(v["valid"] for v in report.values()):
        try:
            _glued_from_args(args)
            report["glued"] = {"valid": True}
        except InputError as exc:
            report["glued"] = {"valid": False, "error": type(exc).__name__, "message": str(exc)}
    text = io.dumps(report)
    if not all(v["valid"] for v in report.values()):
        raise ValidationFailed(text)
    return text


class ValidationFailed(InputError):
    def __init__(self, report_text):
        self.report_text = report_text
        super().__init__("validation failed")


COMMANDS = {
    "fringe": cmd_fringe,
    "tomography": cmd_tomography,
    "dilate": cmd_dilate,
    "measures": cmd_measures,
    "extend": cmd_extend,
    "validate": cmd_validate,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="twopath", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--phi1", help="channel JSON for path 1")
        p.add_argument("--phi2", help="channel JSON for path 2")
        p.add_argument("--gluing", help="gluing JSON")
        p.add_argument("--state", help="internal state JSON")
        p.add_argument("--dilation", help="dilation JSON (path 1; identity in path 2)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", help="output file (default stdout)")
        return p

    p = common(sub.add_parser("fringe", help="simulate fringes, write CSV"))
    p.add_argument("--chi-steps", type=int, default=64)
    p = common(sub.add_parser("tomography", help="recover the gluing from simulated data"))
    p.add_argument("--mode", choices=["standard", "generalized"], default="standard")
    p = common(sub.add_parser("dilate", help="build a dilation for a target gluing"))
    p.add_argument("--target", help="target gluing vector as JSON [[re, im], ...]")
    p.add_argument("--ancilla-dim", type=int)
    p.add_argument("--zero-visibility", action="store_true")
    p.add_argument("--mode", choices=["deterministic", "random"], default=None)
    p.add_argument("--verify", action="store_true")
    common(sub.add_parser("measures", help="visibility measures A, B, F_c"))
    p = common(sub.add_parser("extend", help="occupation-number extension of a channel"))
    p.add_argument("--c1", help="coefficient vector as JSON [[re, im], ...]")
    common(sub.add_parser("validate", help="check input files"))
    return parser


def _error(exc, code):
    payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(payload), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except ValidationFailed as exc:
        sys.stdout.write(exc.report_text)
        return _error(exc, 2)
    except InfeasibleError as exc:
        return _error(exc, 3)
    except (InputError, OSError) as exc:
        return _error(exc, 2)
    except Exception as exc:  # noqa: BLE001
        return _error(exc, 1)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
