"""Participant registration, pseudonymous addresses, roles, and exclusion.

One active registration per card fingerprint, forever: fingerprints of
excluded participants stay bound, so shedding a bad history requires a new
card. A participant may hold several pseudonymous addresses, but balances
and penalties are pooled per participant (the participant id doubles as
the ledger account key; addresses are resolvable aliases).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

from .config import ProtocolConfig
from .errors import (
    DuplicateCard,
    InsufficientFunds,
    ParticipantExcluded,
    UnknownParticipant,
    ValidationError,
)
from .ledger import Ledger

ROLE_PROVIDER = "ServiceProvider"
ROLE_CONSUMER = "Consumer"
ROLE_REVIEWER = "Reviewer"
ROLE_ENDORSER = "Endorser"
ALL_ROLES = frozenset({ROLE_PROVIDER, ROLE_CONSUMER, ROLE_REVIEWER, ROLE_ENDORSER})
REGISTRABLE_ROLES = frozenset({ROLE_PROVIDER, ROLE_CONSUMER})

FAUCET = "FAUCET"

STATUS_ACTIVE = "Active"
STATUS_EXCLUDED = "Excluded"


def card_fingerprint(card: str) -> str:
    """Opaque digest standing in for verified payment-card identity."""
    return hashlib.sha256(card.encode("utf-8")).hexdigest()


@dataclass
class ParticipantRecord:
    participant_id: str
    card: str                      # fingerprint digest, never raw card data
    roles: set[str]
    addresses: list[str]           # first entry backs the shared balance pool
    status: str = STATUS_ACTIVE

    @property
    def active(self) -> bool:
        return self.status == STATUS_ACTIVE


class IdentityRegistry:
    """Tracks participants, card bindings, and address aliases."""

    def __init__(self, config: ProtocolConfig, ledger: Ledger):
        self.config = config
        self.ledger = ledger
        self.participants: dict[str, ParticipantRecord] = {}
        self.cards_bound: set[str] = set()
        self.address_owner: dict[str, str] = {}
        self._next_id = 1
        self._next_addr = 0
        self._exclude_hooks = []
        ledger.open_account(FAUCET, config.faucet_balance)

    def add_exclude_hook(self, hook) -> None:
        """hook(participant_id) -> dict merged into the Excluded event payload."""
        self._exclude_hooks.append(hook)

    def _fresh_address(self) -> str:
        raw = f"addr|{self.ledger.beacon.seed}|{self._next_addr}"
        self._next_addr += 1
        return "0x" + hashlib.sha256(raw.encode("utf-8")).hexdigest()[:40]

    def register(self, card: str, roles) -> str:
        """Register a new participant; the whitewashing defense lives here."""
        fingerprint = card_fingerprint(card)
        if fingerprint in self.cards_bound:
            raise DuplicateCard("card fingerprint already bound to a registration")
        roles = set(roles)
        bad = roles - REGISTRABLE_ROLES
        if bad:
            raise ValidationError(f"roles {sorted(bad)} are earned, not registered")
        if not roles:
            raise ValidationError("at least one role required")
        if self.ledger.balance(FAUCET) < self.config.genesis_balance:
            raise InsufficientFunds("faucet cannot cover the genesis credit")

        pid = f"P{self._next_id:04d}"
        self._next_id += 1
        address = self._fresh_address()
        record = ParticipantRecord(participant_id=pid, card=fingerprint, roles=roles, addresses=[address])
        self.participants[pid] = record
        self.cards_bound.add(fingerprint)
        self.address_owner[address] = pid
        self.ledger.open_account(pid)
        self.ledger.transfer(FAUCET, pid, self.config.genesis_balance)
        self.ledger.append_event(
            "Registered",
            {
                "participant": pid,
                "address": address,
                "roles": sorted(roles),
                "card_fingerprint": fingerprint,
                "genesis_wei": self.config.genesis_balance,
            },
        )
        return pid

    def bind_address(self, participant_id: str) -> str:
        record = self.get_active(participant_id)
        address = self._fresh_address()
        record.addresses.append(address)
        self.address_owner[address] = participant_id
        self.ledger.append_event("AddressBound", {"participant": participant_id, "address": address})
        return address

    def exclude(self, participant_id: str) -> str:
        record = self.get(participant_id)
        if record.status == STATUS_EXCLUDED:
            return STATUS_EXCLUDED  # idempotent
        record.status = STATUS_EXCLUDED
        payload = {"participant": participant_id}
        for hook in self._exclude_hooks:
            payload.update(hook(participant_id))
        self.ledger.append_event("Excluded", payload)
        return STATUS_EXCLUDED

    # -- lookups --

    def get(self, participant_id: str) -> ParticipantRecord:
        if participant_id not in self.participants:
            raise UnknownParticipant(participant_id)
        return self.participants[participant_id]

    def get_active(self, participant_id: str) -> ParticipantRecord:
        record = self.get(participant_id)
        if not record.active:
            raise ParticipantExcluded(participant_id)
        return record

    def resolve_address(self, address: str) -> str:
        if address not in self.address_owner:
            raise UnknownParticipant(f"no participant for address {address}")
        return self.address_owner[address]

    def grant_role(self, participant_id: str, role: str) -> None:
        self.get(participant_id).roles.add(role)

    def revoke_role(self, participant_id: str, role: str) -> None:
        self.get(participant_id).roles.discard(role)

    def has_role(self, participant_id: str, role: str) -> bool:
        return role in self.get(participant_id).roles
