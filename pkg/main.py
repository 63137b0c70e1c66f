import dataclasses
import json
import logging
import os
import re
import sys
import time
import warnings

import pandas as pd
from mpi4py import MPI
from tqdm import tqdm

from ql1pipe import __version__
from ql1pipe.bench import profiles, save
from ql1pipe.bench.suite import (BENCH_COLUMNS, ERROR, bench_frame,
                                 bench_problem, run_suite, summarize_sweep,
                                 sweep_detail, sweep_factors, sweep_problem)
from ql1pipe.solver.config import SolverConfig

# Deactivate warnings from Python unless requested at command line
if not sys.warnoptions:
    warnings.simplefilter("ignore")


# Global values to be shared across all nodes
comm = MPI.COMM_WORLD
size = comm.Get_size()
rank = comm.Get_rank()
ROOT_PATH = os.getcwd()
CONFIG_FILE = ".config.json"
TIME_FMT = "%d-%m-%Y:%I:%M:%S-%p"
TIME = time.localtime(); TIME = time.strftime(TIME_FMT, TIME)
LOG_FMT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Message tags between manager and workers
TAG_GREENLIGHT = 0
TAG_TASK = 1
TAG_RESULT = 2


def attach_logger(node: str) -> logging.Logger:
    """Log this node and the ql1pipe library to data/.logs/<node>/<timestamp>.log."""
    os.makedirs("data/.logs/{}".format(node), exist_ok=True)
    f_handler = logging.FileHandler("data/.logs/{}/{}.log".format(node, TIME))
    f_handler.setFormatter(logging.Formatter(LOG_FMT))

    logger = logging.getLogger("{}-logger".format(node))
    logger.setLevel(logging.INFO); logger.addHandler(f_handler)
    library = logging.getLogger("ql1pipe")
    library.setLevel(logging.INFO); library.addHandler(f_handler)
    return logger


def load_config(path: str) -> dict:
    fin = open(path, "rt"); config = fin.read(); fin.close()
    return json.loads(config)


if rank == 0:
    # Imports only necessary for manager node
    import argparse

    from colorama import Fore, Style, init

    from ql1pipe.probgen import gen_suite, generate, manifest_from_paths, read_manifest
    from ql1pipe.problem import read_problem, write_problem
    from ql1pipe.solver import RunTrace, accuracy, reference_objective, solve
    from ql1pipe.solver.config import ReferenceObjective, SubgradientNorm
    from ql1pipe.solver.trace import Status
    from utils.appinfo.info import license_text, version_text
    from utils.filesystem import getpaths as gp
    from utils.managerops import xml2dict as x2d
    from utils.managerops.unwrap import unwrap_suite
    from utils.workeradmin import greenlight as gl
    from utils.workerops import scattershot as sst


    # Initialize colorama and define lambda functions
    init(autoreset=True)
    print_good = lambda x: print(Fore.GREEN + x)
    print_dim_good = lambda x: print(Fore.GREEN + Style.DIM + x)
    print_info = lambda x: print(Fore.BLUE + x)
    print_dim_info = lambda x: print(Fore.BLUE + Style.DIM + x)
    print_bad = lambda x: print(Fore.RED + x)
    print_status = lambda x: print(Fore.YELLOW + x)


    def parse_param(text: str):
        """Convert a key=value command line pair, guessing int, then float, then str."""
        if "=" not in text:
            raise argparse.ArgumentTypeError("Expected key=value, got {}.".format(text))

        key, value = text.split("=", 1)
        for cast in (int, float):
            try:
                return key, cast(value)

            except ValueError:
                pass

        return key, value


    def load_manifest(source: str) -> pd.DataFrame:
        """Manifest CSV, or a directory of .ql1p files."""
        if os.path.isdir(source):
            return manifest_from_paths(gp.getproblems(source))

        return read_manifest(source)


    def scatter(directives, job: dict, desc: str) -> list:
        """Greenlight the workers, send the job and the sliced directives, and gather rows."""
        global workers_released
        workers_released = True
        gl.killmsg(comm, size, False, tag=TAG_GREENLIGHT)
        for node in range(1, size):
            comm.send(job, dest=node, tag=TAG_TASK)

        node_rank = sst.delegate(comm, size, sst.slice(directives, size), tag=TAG_TASK)
        print_info("Blocking until all workers complete {} tasks.".format(job["command"]))
        return sst.gather(comm, node_rank, tag=TAG_RESULT,
                          progress=lambda ranks: tqdm(ranks, desc=desc, disable=args.noprogress))


    # Initialize argument parser
    fin = open("assets/description.txt"); desc = fin.read(); fin.close()
    fin = open("assets/epilog.txt"); epilog = fin.read(); fin.close()
    parser = argparse.ArgumentParser(prog="ql1pipe",
                                        formatter_class=argparse.RawDescriptionHelpFormatter,
                                        description=desc,
                                        epilog=epilog)
    parser.add_argument("--license", action="store_true", default=False, help="Print ql1pipe licensing info.")
    parser.add_argument("-s", "--silent", action="store_true", default=False, help="Silence all output from ql1pipe.")
    parser.add_argument("-np", "--noprogress", action="store_true", default=False, help="Deactivate progress bars (default: False).")
    parser.add_argument("-V", "--version", action="store_true", default=False, help="Print ql1pipe version info.")
    parser.add_argument("--config", default=CONFIG_FILE, help="Configuration file (default: {}).".format(CONFIG_FILE))
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("gen", help="Generate one problem file.")
    p.add_argument("family", choices=["elastic_net", "sigrec", "strict_comp"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--param", type=parse_param, action="append", default=[], help="Generator parameter key=value.")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("suite", help="Generate a problem suite from an XML control file.")
    p.add_argument("xml_control_file")
    p.add_argument("-o", "--out", required=True, help="Directory for problem files and manifest.csv.")

    p = sub.add_parser("solve", help="Solve one problem.")
    p.add_argument("problem")
    p.add_argument("-a", "--algorithm", default="iicg2", choices=["iicg1", "iicg2", "fista", "istabb"])
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--mode", choices=["subgradient", "reference"], default="subgradient", help="Termination rule.")
    p.add_argument("--fstar", type=float, default=None, help="Reference objective for --mode reference.")
    p.add_argument("--budget", type=int, default=None, help="MV budget.")
    p.add_argument("--alpha-policy", choices=["bb", "constant"], default=None)
    p.add_argument("--lipschitz", type=float, default=None, help="Known largest eigenvalue of A.")
    p.add_argument("--theory-checks", action="store_true", default=False)
    p.add_argument("--trace-out", default=None)
    p.add_argument("--seconds", action="store_true", default=False, help="Add wall time to the trace file.")

    p = sub.add_parser("fstar", help="High-accuracy reference objective of a problem.")
    p.add_argument("problem")
    p.add_argument("-o", "--out", default=None, help="Write {problem, F_star} as JSON.")

    p = sub.add_parser("bench", help="Benchmark solvers on a manifest.")
    p.add_argument("manifest", help="Manifest CSV or directory of .ql1p files.")
    p.add_argument("--solvers", nargs="+", default=None)
    p.add_argument("--tols", type=float, nargs="+", default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None, help="joblib workers when running without MPI.")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("profile", help="Dolan-More profile data from a bench CSV.")
    p.add_argument("bench_csv")
    p.add_argument("--metric", choices=["mv", "seconds"], default="mv")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("pareto", help="Accuracy/nonzeros Pareto frontier of a trace.")
    p.add_argument("trace_csv")
    p.add_argument("--fstar", type=float, required=True)
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("histogram", help="CG iterations per subspace phase of a trace.")
    p.add_argument("trace_csv")
    p.add_argument("-o", "--out", required=True)

    p = sub.add_parser("sweep", help="Gradient-balance steplength sensitivity of iiCG-2.")
    p.add_argument("manifest")
    p.add_argument("--factors", type=float, nargs="+", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("-o", "--out", required=True)

    try:
        args = parser.parse_args()

    except SystemExit:
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)
        raise

    if args.version:
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)
        print(version_text("ql1pipe", __version__, "2026", "ql1pipe developers", ascii_banner="assets/ascii_banner.txt"))
        sys.exit(0)

    if args.license:
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)
        print(license_text("ql1pipe: matrix-free solvers and benchmarks for quadratic l1-regularized problems", "2026",
                           "ql1pipe developers"))
        sys.exit(0)

    if args.command is None:
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)
        parser.print_usage()
        sys.exit(2)

    if args.silent:
        # Write stdout and stderr to /dev/null on host system
        dev_null = open(os.devnull, "wt")
        sys.stdout = dev_null; sys.stderr = dev_null

    logger = attach_logger("manager")
    logger.info("Command line: {}".format(" ".join(sys.argv)))

    print_info("Loading configuration file {}.".format(args.config))
    try:
        config = load_config(args.config)

    except (OSError, ValueError):
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)
        raise OSError(Fore.RED + "Cannot find or read {}. Please verify that {} exists and is readable.".format(args.config, args.config))

    batch = args.command in ("bench", "sweep") and size > 1
    if not batch:
        # Workers are only needed for batch commands
        gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)

    workers_released = not batch

    exit_code = 0
    ref = config.get("reference", dict())
    ref_tol = ref.get("tol", 1e-13); ref_budget_factor = ref.get("budget_factor", 4)

    try:
        if args.command == "gen":
            params = dict(config.get("generators", dict()).get(args.family, dict()))
            params.update(dict(args.param))
            print_status("Generating {} problem with seed {}.".format(args.family, args.seed))
            instance = generate(args.family, args.seed, **params)
            write_problem(args.out, instance.problem)
            print_good("Wrote {} (n={}).".format(args.out, instance.problem.n))

        elif args.command == "suite":
            if re.search(r"\Wxml$", args.xml_control_file) is None:
                raise ValueError(Fore.RED + "Specified control file {} not in XML format.".format(args.xml_control_file))

            if os.path.isfile(args.xml_control_file) is False:
                raise FileNotFoundError(Fore.RED + "Control file {} not found.".format(args.xml_control_file))

            print_info("Parsing control file {} into a suite dictionary.".format(args.xml_control_file))
            suite_control = x2d.xml2dict(args.xml_control_file, config)
            directives = unwrap_suite(suite_control)
            print_status("Generating {} problems for suite {}.".format(len(directives), suite_control["name"]))
            gen_suite(directives, args.out, noprogress=args.noprogress)
            print_good("Suite written to {}.".format(args.out))

        elif args.command == "solve":
            P = read_problem(args.problem)
            cfg = SolverConfig.from_dict(config.get("solver", dict()), algorithm=args.algorithm, tol=args.tol,
                                         mv_budget=args.budget, lipschitz=args.lipschitz,
                                         alpha_policy=args.alpha_policy, theory_checks=args.theory_checks)
            if args.mode == "reference":
                F_star = args.fstar
                if F_star is None:
                    print_info("Computing reference objective.")
                    F_star = reference_objective(P, cfg, ref_tol, ref_budget_factor)

                cfg = dataclasses.replace(cfg, termination=ReferenceObjective(F_star))

            else:
                cfg = dataclasses.replace(cfg, termination=SubgradientNorm())

            print_status("Solving {} with {}.".format(args.problem, cfg.algorithm.value))
            trace = solve(P, cfg)
            report = print_good if trace.status is Status.CONVERGED else print_bad
            report("Status {} after {} MV ({} for L), F = {:.16e}, nnz = {}.".format(
                trace.status.value, trace.mv_total, trace.mv_L, trace.F_final, trace.records[-1].nnz))

            if args.theory_checks:
                if trace.violations == []:
                    print_dim_good("No theory violations.")

                for violation in trace.violations:
                    print_bad("Theory violation: {}".format(violation))

            if args.trace_out is not None:
                save.trace(args.trace_out, trace, seconds=args.seconds)
                print_dim_info("Trace written to {}.".format(args.trace_out))

        elif args.command == "fstar":
            P = read_problem(args.problem)
            cfg = SolverConfig.from_dict(config.get("solver", dict()))
            F_star = reference_objective(P, cfg, ref_tol, ref_budget_factor)
            print("{:.17g}".format(F_star))
            if args.out is not None:
                save.dictionary(args.out, {"problem": args.problem, "F_star": F_star})

        elif args.command == "bench":
            bench_cfg = config.get("bench", dict())
            solvers = args.solvers if args.solvers is not None else bench_cfg.get("solvers", ["iicg1", "iicg2", "fista", "istabb"])
            tols = args.tols if args.tols is not None else bench_cfg.get("tols", [1e-4, 1e-10])
            cfg = SolverConfig.from_dict(config.get("solver", dict()), mv_budget=args.budget)
            manifest = load_manifest(args.manifest)
            print_status("Benchmarking {} solvers on {} problems.".format(len(solvers), len(manifest)))

            if batch:
                job = {"command": "bench", "solvers": solvers, "tols": tols, "cfg": cfg,
                       "ref_tol": ref_tol, "ref_budget_factor": ref_budget_factor}
                table = bench_frame(scatter(sst.generate_bench(manifest), job, "Benchmark task completion progress"))

            else:
                n_jobs = args.jobs if args.jobs is not None else bench_cfg.get("n_jobs", 1)
                table = run_suite(manifest, solvers, tols, cfg.mv_budget, cfg, ref_tol, ref_budget_factor, n_jobs)

            save.dataframe(args.out, table[BENCH_COLUMNS])
            if (table["status"] == ERROR).any():
                print_bad("{} bench rows errored; see the manager log.".format(int((table["status"] == ERROR).sum())))
                exit_code = 1

            print_good("Bench table written to {}.".format(args.out))

        elif args.command == "profile":
            table = pd.read_csv(args.bench_csv)
            save.dataframe(args.out, profiles.dolan_more(table, args.metric, args.tol))
            print_good("Profile data written to {}.".format(args.out))

        elif args.command == "pareto":
            trace = RunTrace.from_frame(pd.read_csv(args.trace_csv))
            save.pareto(args.out, profiles.pareto_frontier(trace, args.fstar))
            print_good("Pareto frontier written to {}.".format(args.out))

        elif args.command == "histogram":
            trace = RunTrace.from_frame(pd.read_csv(args.trace_csv))
            save.histogram(args.out, profiles.cg_phase_histogram(trace))
            print_good("CG phase histogram written to {}.".format(args.out))

        elif args.command == "sweep":
            sweep_cfg = config.get("sweep", dict())
            factors = sweep_factors(args.factors if args.factors is not None else sweep_cfg.get("factors", [1, 10, 100]))
            tol = args.tol if args.tol is not None else sweep_cfg.get("tol", 1e-4)
            cfg = SolverConfig.from_dict(config.get("solver", dict()), mv_budget=args.budget)
            manifest = load_manifest(args.manifest)
            print_status("Sweeping {} factors on {} problems.".format(len(factors), len(manifest)))

            if batch:
                job = {"command": "sweep", "factors": factors, "tol": tol, "cfg": cfg,
                       "ref_tol": ref_tol, "ref_budget_factor": ref_budget_factor}
                detail = pd.DataFrame(scatter(sst.generate_bench(manifest), job, "Sweep task completion progress"),
                                      columns=["problem", "factor", "mv", "status"])

            else:
                n_jobs = args.jobs if args.jobs is not None else config.get("bench", dict()).get("n_jobs", 1)
                detail = sweep_detail(manifest, factors, cfg, tol, ref_tol, ref_budget_factor, n_jobs)

            save.dataframe(args.out, summarize_sweep(detail, factors))
            if (detail["status"] == ERROR).any():
                print_bad("{} sweep runs errored; see the manager log.".format(int((detail["status"] == ERROR).sum())))
                exit_code = 1

            print_good("Sweep table written to {}.".format(args.out))

    except (OSError, ValueError) as err:
        logger.error("{} failed: {}".format(args.command, err))
        if workers_released is False:
            gl.killmsg(comm, size, True, tag=TAG_GREENLIGHT)

        print_bad(str(err))
        exit_code = 1

    sys.exit(exit_code)

else:
    greenlight = comm.recv(source=0, tag=TAG_GREENLIGHT)
    if greenlight != 1:
        sys.exit(0)

    # After getting greenlight, create logger for node
    node = "worker-{}".format(rank)
    logger = attach_logger(node)
    logger.info("Received greenlight message {} from manager node. Begin execution.".format(greenlight))

    job = comm.recv(source=0, tag=TAG_TASK)
    task_list = comm.recv(source=0, tag=TAG_TASK)
    logger.info("Received {} task(s) for command {} from manager.".format(len(task_list), job["command"]))

    results = list()
    for order, name, path in task_list:
        logger.info("Running {} on problem {} ({}).".format(job["command"], name, path))
        if job["command"] == "bench":
            rows = bench_problem(name, path, job["solvers"], job["tols"], job["cfg"], job["ref_tol"],
                                 job["ref_budget_factor"])

        else:
            rows = sweep_problem(name, path, job["factors"], job["cfg"], job["tol"], job["ref_tol"],
                                 job["ref_budget_factor"])

        results.append((order, rows))

    if task_list == []:
        logger.warning("Received empty task list. Returning empty result list to manager.")

    comm.send(results, dest=0, tag=TAG_RESULT)
