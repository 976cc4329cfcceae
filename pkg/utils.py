"""
Console output for the CLI: status lines, the benchmark table and the verification panel.
"""

from typing import Any, Dict, List

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

# Status lines go to stdout after the JSON result line
console = Console()

_MARKS = {
    "success": ("bold green", "✓"),
    "error": ("bold red", "✗"),
    "warning": ("bold yellow", "!"),
    "info": ("bold cyan", "i"),
}


def _status(kind: str, text: str) -> None:
    style, mark = _MARKS[kind]
    console.print(f"[{style}]{mark}[/{style}] {text}")


def print_header(text: str):
    """Print a bold section header preceded by a blank line."""
    console.print(f"\n[bold blue]{text}[/bold blue]")


def print_success(text: str):
    _status("success", text)


def print_error(text: str):
    _status("error", text)


def print_warning(text: str):
    _status("warning", text)


def print_info(text: str):
    _status("info", text)


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def print_bench_table(rows: List[Dict[str, Any]], title: str = "Mean coresets"):
    """Print benchmark cells as a summary table (type, size formula vs measured, error).

    Args:
        rows: Bench records as produced by bench.BenchCell.to_row().
        title: Table title.
    """
    table = Table(title=title)

    table.add_column("Algo", style="cyan")
    table.add_column("Type", style="green")
    table.add_column("eps", justify="right")
    table.add_column("delta", justify="right")
    table.add_column("Size formula", style="yellow")
    table.add_column("Bound", justify="right")
    table.add_column("Max nnz", style="magenta", justify="right")
    table.add_column("Worst error", justify="right")
    table.add_column("Weak ratio", justify="right")
    table.add_column("Success", justify="right")

    for row in rows:
        table.add_row(
            row["algo"],
            row["type"],
            _fmt(row["target_eps"]),
            _fmt(row["delta"]),
            row["size_formula"],
            _fmt(row["size_bound"]),
            _fmt(row["nnz"]),
            _fmt(row["worst_error"]),
            _fmt(row["weak_ratio"]),
            f"{row['success_count']}/{row['trials']}",
        )

    console.print(table)


def print_report(report: Dict[str, Any], title: str = "Verification"):
    """Print an error report as a panel.

    Args:
        report: ErrorReport.to_dict() output.
        title: Panel title.
    """
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            inner = ", ".join(f"{k}={_fmt(v)}" for k, v in value.items())
            lines.append(f"[bold]{key}[/bold]: {inner}")
        else:
            lines.append(f"[bold]{key}[/bold]: {_fmt(value)}")
    console.print(Panel("\n".join(lines), title=title, border_style="green"))
