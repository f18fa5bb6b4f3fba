"""Simulated append-only ledger: accounts, gas metering, event log, ticks.

Money is integer Wei throughout (1 Ether = 10**18 Wei, 1 Gwei = 10**9 Wei);
arithmetic is exact and balances can never go negative. Every state change
appends an EventRecord to a hash chain:

    hash = sha256("{seq}|{tick}|{kind}|{payload_json}|{prev_hash}")

where payload_json is the canonical JSON encoding (sorted keys, compact
separators, UTF-8) and the genesis record's prev_hash is 64 zero hex digits.
Digests are SHA-256, hex-encoded lowercase. The randomness beacon is a
seeded Mersenne Twister behind a partial Fisher-Yates draw, so identical
(seed, call sequence) always reproduces identical output and therefore an
identical final log hash.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field

from .errors import (
    ChainBroken,
    ConfigError,
    InsufficientFunds,
    MalformedEvent,
    PoolTooSmall,
    UnknownAccount,
    ValidationError,
)

WEI_PER_GWEI = 10**9
WEI_PER_ETHER = 10**18

ZERO_DIGEST = "0" * 64

# Operation kinds with a gas schedule entry.
OP_ADD_SERVICE = "add_service"
OP_REQUEST_SERVICE = "request_service"
OP_ENDORSE_REVIEW = "endorse_review"
OP_SUBMIT_REVIEW = "submit_review"
GAS_OPS = (OP_ADD_SERVICE, OP_REQUEST_SERVICE, OP_ENDORSE_REVIEW, OP_SUBMIT_REVIEW)


def ether(amount) -> int:
    """Convert an Ether quantity (int, float, str, Decimal) to integer Wei."""
    from decimal import Decimal

    wei = Decimal(str(amount)) * WEI_PER_ETHER
    if wei != wei.to_integral_value():
        raise ValidationError(f"{amount} Ether is not a whole number of Wei")
    return int(wei)


def format_ether(wei: int, places: int = 6) -> str:
    """Render Wei as a fixed-point Ether string (ROUND_HALF_UP)."""
    from decimal import ROUND_HALF_UP, Decimal

    q = Decimal(1).scaleb(-places)
    return str((Decimal(wei) / WEI_PER_ETHER).quantize(q, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class GasRow:
    gas_limit: int
    gas_used: int


@dataclass(frozen=True)
class GasSchedule:
    """Per-operation gas units plus the Wei price per gas unit.

    Charges are gas_used * price_wei; gas_limit is retained as a cap and
    a schedule where gas_used exceeds gas_limit is rejected as misconfigured.
    """

    price_wei: int = 2_900_000_000  # 2.9 Gwei
    rows: dict[str, GasRow] = field(
        default_factory=lambda: {
            OP_ADD_SERVICE: GasRow(272456, 182304),
            OP_REQUEST_SERVICE: GasRow(99872, 63789),
            OP_ENDORSE_REVIEW: GasRow(106754, 86532),
            OP_SUBMIT_REVIEW: GasRow(99872, 63789),
        }
    )

    def validate(self) -> None:
        if self.price_wei <= 0:
            raise ConfigError("gas price must be strictly positive")
        for op in GAS_OPS:
            if op not in self.rows:
                raise ConfigError(f"gas schedule missing entry for {op}")
        for op, row in self.rows.items():
            if row.gas_used <= 0 or row.gas_limit <= 0:
                raise ConfigError(f"gas units for {op} must be strictly positive")
            if row.gas_used > row.gas_limit:
                raise ConfigError(f"gas_used exceeds gas_limit for {op}")

    def charge(self, op: str) -> int:
        if op not in self.rows:
            raise ConfigError(f"no gas schedule entry for operation {op!r}")
        return self.rows[op].gas_used * self.price_wei


def canonical_payload(payload: dict) -> str:
    """Canonical JSON used both for hashing and for log export."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def record_hash(seq: int, tick: int, kind: str, payload_json: str, prev_hash: str) -> str:
    preimage = f"{seq}|{tick}|{kind}|{payload_json}|{prev_hash}"
    return hashlib.sha256(preimage.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class EventRecord:
    seq: int
    tick: int
    kind: str
    payload: dict
    prev_hash: str
    hash: str

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "seq": self.seq,
                "tick": self.tick,
                "kind": self.kind,
                "payload": self.payload,
                "prev_hash": self.prev_hash,
                "hash": self.hash,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @staticmethod
    def from_json_line(line: str) -> "EventRecord":
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedEvent(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise MalformedEvent("event line is not a JSON object")
        try:
            return EventRecord(
                seq=doc["seq"],
                tick=doc["tick"],
                kind=doc["kind"],
                payload=doc["payload"],
                prev_hash=doc["prev_hash"],
                hash=doc["hash"],
            )
        except KeyError as exc:
            raise MalformedEvent(f"event missing field {exc}") from exc


@dataclass(frozen=True)
class ChainCheck:
    ok: bool
    bad_seq: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_records(records) -> ChainCheck:
    """Recompute every hash and link; report the first bad sequence number."""
    prev = ZERO_DIGEST
    expected_seq = 0
    last_tick = 0
    for rec in records:
        if rec.seq != expected_seq or rec.prev_hash != prev or rec.tick < last_tick:
            return ChainCheck(False, rec.seq)
        recomputed = record_hash(rec.seq, rec.tick, rec.kind, canonical_payload(rec.payload), rec.prev_hash)
        if recomputed != rec.hash:
            return ChainCheck(False, rec.seq)
        prev = rec.hash
        expected_seq += 1
        last_tick = rec.tick
    return ChainCheck(True, None)


class RandomBeacon:
    """Deterministic randomness source (seeded MT19937 plus a draw counter)."""

    def __init__(self, seed: int):
        self.seed = seed
        self.counter = 0
        self._rng = random.Random(seed)

    def draw(self, pool, k: int) -> list:
        """Sample k distinct items without replacement.

        The caller passes the pool in its canonical order (normally sorted
        by id); the draw is a partial Fisher-Yates shuffle over that order,
        so results depend only on (seed, prior draws, pool order, k).
        """
        items = list(pool)
        if k > len(items):
            raise PoolTooSmall(f"cannot draw {k} from pool of {len(items)}")
        for i in range(k):
            j = self._rng.randrange(i, len(items))
            items[i], items[j] = items[j], items[i]
        self.counter += 1
        return items[:k]

    def randint(self, a: int, b: int) -> int:
        self.counter += 1
        return self._rng.randint(a, b)

    def chance(self, p: float) -> bool:
        """True with probability p."""
        self.counter += 1
        return self._rng.random() < p


class Ledger:
    """Single-threaded account store with gas sink, tick counter, and event log.

    Accounts are opened with a zero balance except at genesis (the faucet);
    afterwards money only moves, so the sum of all accounts plus the gas
    sink is constant apart from amounts explicitly parked in external pools
    (service review funds) via debit()/credit().
    """

    def __init__(self, gas: GasSchedule, seed: int):
        gas.validate()
        self.gas = gas
        self.accounts: dict[str, int] = {}
        self.gas_sink = 0
        self.log: list[EventRecord] = []
        self.tick = 0
        self.beacon = RandomBeacon(seed)
        self._tick_hooks = []

    # -- accounts --

    def open_account(self, account_id: str, initial_balance: int = 0) -> None:
        if account_id in self.accounts:
            raise ValidationError(f"account {account_id} already exists")
        if initial_balance < 0:
            raise ValidationError("initial balance cannot be negative")
        self.accounts[account_id] = initial_balance

    def exists(self, account_id: str) -> bool:
        return account_id in self.accounts

    def balance(self, account_id: str) -> int:
        if account_id not in self.accounts:
            raise UnknownAccount(account_id)
        return self.accounts[account_id]

    def debit(self, account_id: str, amount: int) -> None:
        if amount < 0:
            raise ValidationError("negative debit")
        if self.balance(account_id) < amount:
            raise InsufficientFunds(f"{account_id} holds {self.accounts[account_id]} Wei, needs {amount}")
        self.accounts[account_id] -= amount

    def credit(self, account_id: str, amount: int) -> None:
        if amount < 0:
            raise ValidationError("negative credit")
        self.balance(account_id)
        self.accounts[account_id] += amount

    def transfer(self, src: str, dst: str, amount: int) -> None:
        self.balance(dst)
        self.debit(src, amount)
        self.accounts[dst] += amount

    def credit_gas_sink(self, amount: int) -> None:
        if amount < 0:
            raise ValidationError("negative gas sink credit")
        self.gas_sink += amount

    def total_account_wei(self) -> int:
        return sum(self.accounts.values())

    # -- gas --

    def gas_cost(self, op: str) -> int:
        return self.gas.charge(op)

    def charge_gas(self, payer: str, op: str) -> int:
        """Debit gas_used(op) * price from payer into the gas sink."""
        amount = self.gas.charge(op)
        self.debit(payer, amount)
        self.gas_sink += amount
        self.append_event("GasCharged", {"payer": payer, "op": op, "amount_wei": amount})
        return amount

    # -- event log --

    def append_event(self, kind: str, payload: dict) -> EventRecord:
        seq = len(self.log)
        prev = self.log[-1].hash if self.log else ZERO_DIGEST
        payload_json = canonical_payload(payload)
        rec = EventRecord(
            seq=seq,
            tick=self.tick,
            kind=kind,
            payload=payload,
            prev_hash=prev,
            hash=record_hash(seq, self.tick, kind, payload_json, prev),
        )
        self.log.append(rec)
        return rec

    def verify_chain(self) -> ChainCheck:
        return verify_records(self.log)

    def final_hash(self) -> str:
        return self.log[-1].hash if self.log else ZERO_DIGEST

    def export_log(self) -> str:
        """Newline-delimited JSON, one event per line, LF endings."""
        return "".join(rec.to_json_line() + "\n" for rec in self.log)

    # -- time --

    def add_tick_hook(self, hook) -> None:
        self._tick_hooks.append(hook)

    def advance_tick(self) -> int:
        self.tick += 1
        for hook in self._tick_hooks:
            hook(self.tick)
        return self.tick


def load_log_lines(text: str) -> list[EventRecord]:
    """Parse an exported ndjson log, raising MalformedEvent on bad lines."""
    records = []
    for line in text.splitlines():
        if line.strip():
            records.append(EventRecord.from_json_line(line))
    return records


def verify_log_records(records: list[EventRecord]) -> None:
    """Raise ChainBroken unless the records form an intact chain."""
    check = verify_records(records)
    if not check.ok:
        raise ChainBroken(check.bad_seq if check.bad_seq is not None else -1)
