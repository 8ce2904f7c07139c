"""
Coverage-vs-pi plot data and figure
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import seaborn as sns  # noqa: E402

from ancova_check.models.simulation import SimReport  # noqa: E402

logger = logging.getLogger(__name__)

PLOT_COLUMNS = ['scenario', 'pi', 'n', 'estimator', 'coverage', 'coverage_mc_se', 'predicted_coverage']


def coverage_frame(reports: Sequence[SimReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        for summary in report.summaries:
            rows.append({
                'scenario': report.plan.label,
                'pi': report.plan.dgp.pi,
                'n': report.plan.n,
                'estimator': summary.kind.value,
                'coverage': summary.coverage,
                'coverage_mc_se': summary.mc_se['coverage'],
                'predicted_coverage': 1.0 - summary.predicted_rejection,
            })
    frame = pd.DataFrame(rows, columns=PLOT_COLUMNS)
    return frame.sort_values(['estimator', 'pi', 'scenario'], kind='mergesort').reset_index(drop=True)


def write_coverage_plot(reports: Sequence[SimReport], output: Path, level: float = 0.95) -> Optional[Path]:
    """
    Write coverage_vs_pi.csv and, when rendering works, coverage_vs_pi.png.
    Returns the image path or None.
    """
    output = Path(output)
    output.mkdir(parents=True, exist_ok=True)
    frame = coverage_frame(reports)
    frame.to_csv(output / 'coverage_vs_pi.csv', index=False, float_format='%.17g', lineterminator='\n')
    if frame.empty:
        return None

    image = output / 'coverage_vs_pi.png'
    try:
        sns.set_theme(style='whitegrid')
        fig, ax = plt.subplots(figsize=(8, 5))
        sns.lineplot(data=frame, x='pi', y='coverage', hue='estimator', marker='o', errorbar=None, ax=ax)
        ax.axhline(level, linestyle='--', color='gray', label=f"nominal {level:g}")
        ax.set_xlabel('randomisation probability pi')
        ax.set_ylabel('CI coverage')
        ax.set_title('Empirical coverage by estimator')
        ax.legend(loc='lower left')
        fig.savefig(image, bbox_inches='tight', dpi=150)
        plt.close(fig)
    except Exception as exc:
        logger.warning(f"Could not render {image}: {exc}")
        return None
    logger.info(f"Saved coverage plot to {image}")
    return image
