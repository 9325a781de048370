"""
ADAPTIVE LOADING - Carregamento Diagonal Adaptativo com Piso de WNG
Ponto de Entrada Principal (run | scan | bench)
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from src.core.errors import ConfigError

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(name)-20s | %(message)s'
DEFAULT_CONFIG = "config/settings.yaml"

logger = logging.getLogger("ADL")


def setup_logging(log_file: Optional[Path] = None) -> None:
    """Configura o logging uma única vez (stdout + run.log no diretório de saída)."""
    level = getattr(logging, os.getenv("ADL_LOG_LEVEL", "INFO").upper(), logging.INFO)
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]
    if log_file is not None:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def print_banner():
    """Exibe banner de inicialização."""
    banner = """
    ==================================================================

         WNG-Constrained Adaptive Diagonal Loading
         MPDR / GSC  |  Trace . Gershgorin . Exact EVD

    ==================================================================
    """
    print(banner)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="main.py",
        description="Simulação de beamformers MPDR/GSC com carregamento diagonal sob piso de WNG",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("run", "executa o ensemble de trials"),
                            ("scan", "espectro espacial verdadeiro (Capon sobre a ECM) ao longo do tempo")):
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("config", nargs="?", default=DEFAULT_CONFIG, help="arquivo de configuração (JSON ou YAML)")
        sub.add_argument("--trials", type=int, help="número de trials")
        sub.add_argument("--seed", type=int, help="semente base (trial i usa seed + i)")
        sub.add_argument("--out", help="diretório de saída")
        sub.add_argument("--workers", type=int, help="processos paralelos")
        sub.add_argument("--no-banner", action="store_true", help="omite o banner")

    bench = subparsers.add_parser("bench", help="custo dos estimadores de limites espectrais")
    bench.add_argument("--orders", type=int, nargs="+", default=[16, 32, 64, 128], help="ordens M")
    bench.add_argument("--repeats", type=int, default=5, help="repetições por medida (mediana)")
    bench.add_argument("--out", default="data/outputs", help="diretório de saída")
    bench.add_argument("--no-banner", action="store_true", help="omite o banner")
    return parser


def _emit_error(kind: str, message: str, field: Optional[str] = None) -> None:
    payload = {"error": kind, "message": message, "field": field}
    print(json.dumps(payload, ensure_ascii=False), file=sys.stderr)


def run_command(args: argparse.Namespace) -> int:
    from src.core.config import load_config
    from src.core.orchestrator import ExperimentOrchestrator

    config = load_config(args.config).with_overrides(
        trials=args.trials, seed=args.seed, output_dir=args.out, workers=args.workers)
    setup_logging(Path(config.output_dir) / "run.log")
    logger.info(f"Configuração: {args.config} -> saída em {config.output_dir}")

    orchestrator = ExperimentOrchestrator(config)
    if args.command == "scan":
        orchestrator.scan_spatial_spectrum()
    else:
        orchestrator.run_experiment()
    return 0


def bench_command(args: argparse.Namespace) -> int:
    from src.analysis.benchmark import benchmark_bounds
    from src.core.results_writer import ResultsWriter

    setup_logging(Path(args.out) / "run.log")
    result = benchmark_bounds(orders=args.orders, repeats=args.repeats)
    ResultsWriter(args.out).write_bench(result.table)
    for mode, slope in result.slopes.items():
        logger.info(f"{mode:<10} inclinação {slope:.2f}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal; retorna o código de saída."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    if not args.no_banner:
        print_banner()
    setup_logging()

    try:
        if args.command == "bench":
            return bench_command(args)
        return run_command(args)
    except ConfigError as e:
        logger.error(f"Configuração inválida: {e}")
        _emit_error("ConfigError", e.reason, e.field)
        return 2
    except KeyboardInterrupt:
        logger.info("Interrupção recebida, encerrando...")
        return 130
    except Exception as e:
        logger.exception(f"Erro fatal: {e}")
        _emit_error(type(e).__name__, str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
