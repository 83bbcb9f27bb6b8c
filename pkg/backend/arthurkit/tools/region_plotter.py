"""
Region plotter for two-factor Π_Ā arrangements.

Draws the reducibility walls of a ``region_dump`` document, shades the
chambers in R_Ā and marks every chamber witness.
"""

import base64
import io
import logging
from fractions import Fraction
from typing import Any, ClassVar

logger = logging.getLogger(__name__)

# Try to import visualization libraries
try:
    import numpy as np

    NUMPY_AVAILABLE = True
except ImportError:
    NUMPY_AVAILABLE = False
    np = None  # type: ignore[assignment]

try:
    import matplotlib

    matplotlib.use("Agg")  # Use non-interactive backend
    import matplotlib.pyplot as plt

    MATPLOTLIB_AVAILABLE = True
except ImportError:
    MATPLOTLIB_AVAILABLE = False
    matplotlib = None
    plt = None  # type: ignore[assignment]
    logger.warning("matplotlib not installed - region plots are unavailable")


class RegionPlotter:
    """Render a chamber dump as a base64 PNG."""

    FIGURE_SIZE: ClassVar[tuple[int, int]] = (7, 7)
    DPI: ClassVar[int] = 100
    GRID: ClassVar[int] = 600
    VERDICT_COLORS: ClassVar[dict[str, str]] = {
        "inAbar": "#a6cee3",
        "indeterminateUnitarity": "#fdbf6f",
        "conflict": "#fb9a99",
    }

    def run(self, dump: dict[str, Any]) -> str:
        """
        Plot one arrangement.

        Args:
            dump: Output of ``abar_regions.region_dump``

        Returns:
            Base64 encoded PNG, or a message starting with ``Error:``
        """
        if not NUMPY_AVAILABLE or not MATPLOTLIB_AVAILABLE:
            missing = [name for name, ok in (("numpy", NUMPY_AVAILABLE), ("matplotlib", MATPLOTLIB_AVAILABLE)) if not ok]
            return f"Error: missing libraries {', '.join(missing)}"
        if len(dump.get("shapes", [])) != 2:
            return "Error: only two-factor arrangements can be plotted"
        return self._generate_plot(dump)

    @staticmethod
    def _extent(dump: dict[str, Any]) -> float:
        values = [abs(float(Fraction(w["offset"]))) for w in dump["walls"]]
        values += [abs(float(Fraction(p))) for c in dump["chambers"] for p in c["witness"]]
        return max(values, default=1.0) + 1.0

    def _generate_plot(self, dump: dict[str, Any]) -> str:
        assert plt is not None
        assert np is not None
        fig, ax = plt.subplots(figsize=self.FIGURE_SIZE, dpi=self.DPI)
        bound = self._extent(dump)

        axis = np.linspace(-bound, bound, self.GRID)
        X, Y = np.meshgrid(axis, axis)
        walls = dump["walls"]
        if walls:
            coeffs = np.array([w["coeffs"] for w in walls], dtype=float)
            offsets = np.array([float(Fraction(w["offset"])) for w in walls])
            signs = np.sign(
                coeffs[:, 0, None, None] * X + coeffs[:, 1, None, None] * Y - offsets[:, None, None]
            )
        else:
            signs = np.zeros((0, *X.shape))

        for verdict, color in self.VERDICT_COLORS.items():
            mask = np.zeros_like(X, dtype=bool)
            for chamber in dump["chambers"]:
                if chamber["verdict"] != verdict:
                    continue
                wanted = np.array(chamber["signs"], dtype=float)[:, None, None]
                mask |= np.all(signs == wanted, axis=0)
            if mask.any():
                ax.contourf(X, Y, mask.astype(int), levels=[0.5, 1.5], colors=[color], alpha=0.6)

        line = np.linspace(-bound, bound, 2)
        for wall in walls:
            a, b = wall["coeffs"]
            t = float(Fraction(wall["offset"]))
            if b:
                ax.plot(line, (t - a * line) / b, color="#1f78b4", linewidth=1)
            else:
                ax.axvline(x=t / a, color="#1f78b4", linewidth=1)

        for chamber in dump["chambers"]:
            x, y = (float(Fraction(p)) for p in chamber["witness"])
            marker = "o" if chamber["bounded"] else "x"
            ax.scatter([x], [y], s=18, marker=marker, color="black", zorder=5)

        shapes = ", ".join(f"({a},{b})" for a, b in dump["shapes"])
        ax.set_xlim(-bound, bound)
        ax.set_ylim(-bound, bound)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
        ax.set_title(f"{shapes} over {dump['base']}", fontsize=11)
        ax.grid(True, alpha=0.3)
        ax.set_aspect("equal", adjustable="box")
        plt.tight_layout()

        buffer = io.BytesIO()
        plt.savefig(buffer, format="png", dpi=self.DPI, bbox_inches="tight", facecolor="white", edgecolor="none")
        buffer.seek(0)
        image_base64 = base64.b64encode(buffer.read()).decode()
        plt.close(fig)
        return image_base64
