"""
Report generation utilities
"""

import json
import logging
from pathlib import Path
from datetime import datetime
from typing import Dict, Optional

import pandas as pd

from config import APP_NAME, APP_VERSION, REPORT_SCHEMA, RNG_NAME, SWEEP_CSV_COLUMNS
from utils.frame_io import frame_to_dict
from utils.verifier import VerificationResult

logger = logging.getLogger(__name__)


class ReportGenerator:
    """Generate machine-readable and summary reports for verification runs"""

    @staticmethod
    def build_report(result: VerificationResult, timestamp: Optional[str] = None) -> Dict:
        """
        Assemble the JSON report

        Everything except 'timestamp' is a function of the configuration, so
        two runs with the same config differ only in that field.
        """
        cert = result.certificate
        return {
            'schema': REPORT_SCHEMA,
            'tool': APP_NAME,
            'version': APP_VERSION,
            'timestamp': timestamp or datetime.now().isoformat(timespec='seconds'),
            'rng': RNG_NAME,
            'config': result.config.to_dict(),
            'frames': {
                'n': result.n,
                'dim': result.dim,
                'phi': frame_to_dict(result.phi),
                'psi': frame_to_dict(result.psi),
            },
            'certificate': cert.to_dict() if cert is not None else None,
            'certified': result.certified,
            'sigma': {
                'mode': result.config.sigma_mode,
                'partitions': result.partitions,
                'complete': result.sigma_complete,
            },
            'theorems': result.theorem_summary(),
            'failures': result.failures,
            'pass': result.passed,
        }

    @staticmethod
    def write_json_report(result: VerificationResult, report_path: Path,
                          timestamp: Optional[str] = None) -> Path:
        report_path = Path(report_path)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(report_path, 'w', encoding='utf-8') as f:
                json.dump(ReportGenerator.build_report(result, timestamp), f, indent=2)
                f.write('\n')
            logger.info(f"Report written: {report_path}")
            return report_path
        except Exception as e:
            logger.error(f"Failed to write report: {e}")
            raise

    @staticmethod
    def generate_summary_report(result: VerificationResult, report_path: Path) -> Path:
        """
        Write the human-readable companion of a JSON report

        Args:
            result: Finished verification
            report_path: Target text file

        Returns:
            Path to generated report file
        """
        report_path = Path(report_path)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        cfg = result.config

        try:
            with open(report_path, 'w', encoding='utf-8') as f:
                # Header
                f.write("=" * 80 + "\n")
                f.write("WEAVING IDENTITY VERIFICATION REPORT\n")
                f.write("=" * 80 + "\n")
                f.write(f"Generated: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
                f.write(f"{APP_NAME} v{APP_VERSION}, seed {cfg.seed}, rng {RNG_NAME}\n")
                f.write("=" * 80 + "\n\n")

                # Pair
                f.write("WOVEN PAIR\n")
                f.write("-" * 80 + "\n")
                f.write(f"Vectors: {result.n} in C^{result.dim}\n")
                if result.certificate is not None:
                    cert = result.certificate
                    f.write(f"Universal bounds: A = {cert.universal_lower:.12g} "
                            f"(sigma {cert.witness_partition_lower}), "
                            f"B = {cert.universal_upper:.12g} (sigma {cert.witness_partition_upper})\n")
                    f.write(f"Partitions certified: {cert.partitions_checked}\n")
                    if cert.borderline:
                        f.write(f"Borderline weavings: {len(cert.borderline)}\n")
                else:
                    f.write("Not certified (too many vectors for exhaustive enumeration)\n")
                coverage = "all" if result.sigma_complete else "sampled, INCOMPLETE"
                f.write(f"Partitions verified: {result.partitions} ({coverage})\n")
                f.write(f"Trials per partition: {cfg.trials}\n")
                f.write(f"Lambda grid: {', '.join(f'{lam:g}' for lam in cfg.lambda_grid)}\n")
                if cfg.corrupt_dual:
                    f.write("\n⚠ CORRUPTED DUAL INJECTED (negative control)\n")
                f.write("\n")

                # Per-theorem table
                f.write("THEOREM SUMMARY\n")
                f.write("-" * 80 + "\n")
                f.write(f"{'theorem':<20}{'records':>10}{'failed':>10}{'max residual':>18}{'min slack':>18}\n")
                for theorem_id, stats in result.theorem_summary().items():
                    f.write(f"{theorem_id:<20}{stats['count']:>10}{stats['failed']:>10}"
                            f"{ReportGenerator._format_value(stats['max_residual']):>18}"
                            f"{ReportGenerator._format_value(stats['min_slack']):>18}\n")
                f.write("\n")

                # Failures
                if result.failures:
                    f.write(f"FAILURES ({len(result.failures)})\n")
                    f.write("-" * 80 + "\n")
                    for entry in result.failures:
                        lam = entry['lambda']
                        label = f" [{entry['label']}]" if entry.get('label') else ""
                        f.write(f"\n✗ {entry['theorem']}{label} sigma={entry['sigma']} "
                                f"lambda={'-' if lam is None else f'{lam:g}'} trial={entry['trial']}\n")
                        f.write(f"  residual: {ReportGenerator._format_value(entry['residual'])}\n")
                        f.write(f"  slack: {ReportGenerator._format_value(entry['slack'])}\n")
                    f.write("\n")

                # Footer
                f.write("=" * 80 + "\n")
                f.write(f"OVERALL: {'PASS' if result.passed else 'FAIL'}\n")
                f.write("=" * 80 + "\n")

            logger.info(f"Summary generated: {report_path}")
            return report_path

        except Exception as e:
            logger.error(f"Failed to generate summary: {e}")
            raise

    @staticmethod
    def sweep_frame(result: VerificationResult) -> pd.DataFrame:
        """
        One row per (lambda, theorem): min slack and max residual over every
        trial. The lambda cell is empty for identities without a parameter.
        """
        return pd.DataFrame(result.lambda_rows(), columns=SWEEP_CSV_COLUMNS)

    @staticmethod
    def write_sweep_csv(result: VerificationResult, csv_path: Path) -> Path:
        csv_path = Path(csv_path)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        frame = ReportGenerator.sweep_frame(result)
        frame.to_csv(csv_path, index=False)
        logger.info(f"Sweep written: {csv_path} ({len(frame)} rows)")
        return csv_path

    @staticmethod
    def _format_value(value: Optional[float]) -> str:
        """Scientific notation, '-' for a missing part"""
        if value is None:
            return "-"
        return f"{value:.3e}"
