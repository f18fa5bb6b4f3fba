"""Facade wiring the ledger, identity, marketplace, tokens, and reviews.

A Simulation owns one isolated protocol instance. All mutations go through
its methods; after every committed operation (when check_conservation is
on) it re-asserts the money conservation law:

    sum(accounts) + gas_sink + sum(review funds) == genesis total

Operations validate all preconditions before touching state, so a raised
DdrmError leaves the simulation exactly as it was. snapshot() serializes
the entire mutable state to a JSON-safe dict (and fingerprint() hashes
it), which the test suite uses to prove that failed operations are
side-effect free.
"""

from __future__ import annotations

import hashlib
import json

from .config import ProtocolConfig
from .endorsement import ReviewBoard
from .errors import InvariantViolation
from .identity import IdentityRegistry
from .ledger import Ledger
from .marketplace import Marketplace
from .tokens import TokenBook


class Simulation:
    """One deterministic, isolated run of the protocol."""

    def __init__(self, config: ProtocolConfig | None = None, seed: int = 42):
        self.config = config or ProtocolConfig()
        self.config.validate()
        self.seed = seed
        self.ledger = Ledger(self.config.gas, seed)
        self.identity = IdentityRegistry(self.config, self.ledger)
        self.tokens = TokenBook(self.config, self.ledger)
        self.market = Marketplace(self.config, self.ledger, self.identity, self.tokens)
        self.reviews = ReviewBoard(self.config, self.ledger, self.identity, self.market, self.tokens)
        self.identity.add_exclude_hook(self.tokens.void_all)
        self.identity.add_exclude_hook(self.reviews.remove_from_rosters)
        self.identity.add_exclude_hook(self.market.withdraw_all_for)
        self.ledger.add_tick_hook(self.tokens.expiry_sweep)
        self._genesis_total = self.conservation_total()

    # -- invariants --

    def conservation_total(self) -> int:
        return self.ledger.total_account_wei() + self.ledger.gas_sink + self.market.total_fund_wei()

    def conservation_ok(self) -> bool:
        return self.conservation_total() == self._genesis_total

    def _conserved(self, value):
        if self.config.check_conservation:
            total = self.conservation_total()
            if total != self._genesis_total:
                raise InvariantViolation(
                    f"conservation broken: {total} != genesis {self._genesis_total}"
                )
        return value

    # -- identity --

    def register(self, card: str, roles) -> str:
        return self._conserved(self.identity.register(card, roles))

    def bind_address(self, participant_id: str) -> str:
        return self._conserved(self.identity.bind_address(participant_id))

    def exclude(self, participant_id: str) -> str:
        return self._conserved(self.identity.exclude(participant_id))

    # -- marketplace --

    def add_service(self, provider: str, s_cost: int) -> str:
        return self._conserved(self.market.add_service(provider, s_cost))

    def buy_service(self, consumer: str, service_id: str, srdt_token_id: str | None = None) -> str:
        return self._conserved(self.market.buy_service(consumer, service_id, srdt_token_id))

    def modify_service(self, provider: str, service_id: str, new_cost: int) -> None:
        return self._conserved(self.market.modify_service(provider, service_id, new_cost))

    def withdraw_service(self, provider: str, service_id: str) -> None:
        return self._conserved(self.market.withdraw_service(provider, service_id))

    def replenish_fund(self, provider: str, service_id: str, amount: int) -> int:
        return self._conserved(self.market.replenish_fund(provider, service_id, amount))

    # -- reviews and endorsement --

    def submit_review(self, consumer: str, purchase_id: str, rating: int, digest: str) -> str:
        return self._conserved(self.reviews.submit_review(consumer, purchase_id, rating, digest))

    def endorse_review(self, endorser: str, review_id: str, vote: str):
        return self._conserved(self.reviews.endorse_review(endorser, review_id, vote))

    def run_endorser_selection(self, service_id: str) -> dict:
        return self._conserved(self.reviews.run_endorser_selection(service_id))

    def bootstrap_endorsers(self, service_id: str, n: int | None = None) -> list[str]:
        return self._conserved(self.reviews.bootstrap_endorsers(service_id, n))

    # -- refunds --

    def file_refund_claim(self, consumer: str, purchase_id: str) -> str:
        return self._conserved(self.reviews.file_refund_claim(consumer, purchase_id))

    def vote_refund(self, endorser: str, claim_id: str, vote: str) -> str:
        return self._conserved(self.reviews.vote_refund(endorser, claim_id, vote))

    def settle_refund(self, claim_id: str) -> str:
        return self._conserved(self.reviews.settle_refund(claim_id))

    # -- time --

    def advance_tick(self) -> int:
        return self._conserved(self.ledger.advance_tick())

    # -- state capture --

    def snapshot(self) -> dict:
        """Full mutable state as a JSON-safe dict (ordering canonicalized)."""
        return {
            "accounts": dict(sorted(self.ledger.accounts.items())),
            "gas_sink": self.ledger.gas_sink,
            "tick": self.ledger.tick,
            "log_len": len(self.ledger.log),
            "log_hash": self.ledger.final_hash(),
            "beacon_counter": self.ledger.beacon.counter,
            "participants": {
                pid: {
                    "status": p.status,
                    "roles": sorted(p.roles),
                    "addresses": list(p.addresses),
                    "card": p.card,
                }
                for pid, p in sorted(self.identity.participants.items())
            },
            "services": {
                sid: {
                    "provider": s.provider,
                    "s_cost": s.s_cost,
                    "fund": s.review_fund,
                    "status": s.status,
                    "authentic": s.authentic_review_count,
                }
                for sid, s in sorted(self.market.services.items())
            },
            "purchases": {
                pid: {
                    "service": p.service_id,
                    "consumer": p.consumer,
                    "price": p.price_paid,
                    "reviewed": p.reviewed,
                    "refunded": p.refunded,
                }
                for pid, p in sorted(self.market.purchases.items())
            },
            "srats": {
                tid: {"holder": t.holder, "state": t.state, "expiry": t.expiry_tick}
                for tid, t in sorted(self.tokens.srats.items())
            },
            "srdts": {
                tid: {"holder": t.holder, "state": t.state, "expiry": t.expiry_tick}
                for tid, t in sorted(self.tokens.srdts.items())
            },
            "dret": dict(sorted(self.tokens.dret.items())),
            "reviews": {
                rid: {
                    "reviewer": r.reviewer,
                    "rating": r.rating,
                    "up": r.upvotes,
                    "down": r.downvotes,
                    "badge": r.badge,
                }
                for rid, r in sorted(self.reviews.reviews.items())
            },
            "rosters": {sid: sorted(m) for sid, m in sorted(self.reviews.rosters.items())},
            "penalties": dict(sorted(self.reviews.penalties.items())),
            "claims": {
                cid: {
                    "purchase": c.purchase_id,
                    "outcome": c.outcome,
                    "votes": dict(sorted(c.votes.items())),
                }
                for cid, c in sorted(self.reviews.claims.items())
            },
        }

    def fingerprint(self) -> str:
        blob = json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()
