"""Gas-cost table and scenario report formatting.

Monetary display follows the published precision: Ether to 6 decimal
places, USD to 3, both ROUND_HALF_UP, with the USD figure computed from
the already-rounded Ether value.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .adversary import ScenarioMetrics
from .ledger import (
    OP_ADD_SERVICE,
    OP_ENDORSE_REVIEW,
    OP_REQUEST_SERVICE,
    WEI_PER_ETHER,
    WEI_PER_GWEI,
    GasSchedule,
)

# The three operations of the published cost table, in row order.
GAS_TABLE_OPS = (
    (OP_ADD_SERVICE, "Drone Service Provider", "Add Service"),
    (OP_REQUEST_SERVICE, "Consumer", "Request Service"),
    (OP_ENDORSE_REVIEW, "Endorser", "Endorse Review"),
)

_ETHER_Q = Decimal("0.000001")
_USD_Q = Decimal("0.001")


@dataclass(frozen=True)
class GasReportRow:
    caller: str
    function_name: str
    gas_limit: int
    gas_used: int
    gas_price_gwei: Decimal
    total_ether: Decimal
    total_usd: Decimal


def gas_table_rows(schedule: GasSchedule, usd_per_ether: Decimal) -> list[GasReportRow]:
    schedule.validate()
    price_gwei = (Decimal(schedule.price_wei) / WEI_PER_GWEI).normalize()
    rows = []
    for op, caller, name in GAS_TABLE_OPS:
        row = schedule.rows[op]
        wei = row.gas_used * schedule.price_wei
        total_ether = (Decimal(wei) / WEI_PER_ETHER).quantize(_ETHER_Q, rounding=ROUND_HALF_UP)
        total_usd = (total_ether * usd_per_ether).quantize(_USD_Q, rounding=ROUND_HALF_UP)
        rows.append(
            GasReportRow(
                caller=caller,
                function_name=name,
                gas_limit=row.gas_limit,
                gas_used=row.gas_used,
                gas_price_gwei=price_gwei,
                total_ether=total_ether,
                total_usd=total_usd,
            )
        )
    return rows


def format_gas_table(rows: list[GasReportRow]) -> str:
    headers = (
        "Function Caller", "Function Name", "Gas Limit (Units)", "Gas Used (Units)",
        "Gas Price (Gwei)", "Total (Ether)", "Total (USD)",
    )
    cells = [headers] + [
        (
            r.caller,
            r.function_name,
            str(r.gas_limit),
            str(r.gas_used),
            str(r.gas_price_gwei),
            f"{r.total_ether:.6f}",
            f"{r.total_usd:.3f}",
        )
        for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def gas_table_json(rows: list[GasReportRow]) -> list[dict]:
    return [
        {
            "caller": r.caller,
            "function_name": r.function_name,
            "gas_limit": r.gas_limit,
            "gas_used": r.gas_used,
            "gas_price_gwei": str(r.gas_price_gwei),
            "total_ether": f"{r.total_ether:.6f}",
            "total_usd": f"{r.total_usd:.3f}",
        }
        for r in rows
    ]


def format_metrics_table(named_metrics: list[tuple[str, ScenarioMetrics]]) -> str:
    headers = (
        "Scenario", "BadgeAcc", "Spend (Wei)", "RevAccepted", "RevBranded",
        "Exclusions", "RefundFraud", "DretDelta",
    )
    cells = [headers] + [
        (
            name,
            f"{m.badge_accuracy:.4f}",
            str(m.attacker_spend_wei),
            str(m.attacker_reviews_accepted),
            str(m.attacker_reviews_branded),
            str(m.exclusions),
            str(m.refund_fraud_approved),
            str(m.provider_dret_delta),
        )
        for name, m in named_metrics
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(len(headers))]
    lines = []
    for i, row in enumerate(cells):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
