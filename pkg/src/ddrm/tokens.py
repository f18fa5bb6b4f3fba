"""Lifecycle of the three token roles: SRAT, SRDT, and DRET.

SRAT (review authorization) is minted one-per-purchase and burned by the
review that uses it. SRDT (endorser reward) is granted on selection and
consumed exactly once, by an endorsement vote or a discounted purchase.
DRET is a non-transferable per-provider reputation counter that grows as
a provider's services accumulate authentic-badged reviews.

Tokens move Active -> (Burned | Consumed | Expired | Voided) exactly once;
expiry is inclusive: a token is dead at tick >= expiry_tick even before
the sweep has run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .config import ProtocolConfig
from .errors import TokenExpired, TokenNotActive, ValidationError
from .ledger import Ledger

ACTIVE = "Active"
BURNED = "Burned"
CONSUMED = "Consumed"
EXPIRED = "Expired"
VOIDED = "Voided"

PURPOSE_ENDORSEMENT = "Endorsement"
PURPOSE_DISCOUNT = "DiscountedPurchase"


@dataclass
class SratToken:
    token_id: str
    holder: str
    service_id: str
    purchase_id: str
    minted_tick: int
    expiry_tick: int
    state: str = ACTIVE


@dataclass
class SrdtToken:
    token_id: str
    holder: str
    service_id: str
    minted_tick: int
    expiry_tick: int
    discount_rate: Fraction
    state: str = ACTIVE
    consumed_for: str | None = None


class TokenBook:
    """Registry and state machine for all token instances."""

    def __init__(self, config: ProtocolConfig, ledger: Ledger):
        self.config = config
        self.ledger = ledger
        self.srats: dict[str, SratToken] = {}
        self.srdts: dict[str, SrdtToken] = {}
        self.srat_by_purchase: dict[str, str] = {}
        self.dret: dict[str, int] = {}
        self._dret_rewarded: dict[str, int] = {}   # service -> crossings already paid
        self._next_srat = 1
        self._next_srdt = 1

    # -- SRAT --

    def mint_srat(self, consumer: str, service_id: str, purchase_id: str) -> str:
        if purchase_id in self.srat_by_purchase:
            raise ValidationError(f"purchase {purchase_id} already has a review token")
        token_id = f"SRAT-{self._next_srat:05d}"
        self._next_srat += 1
        tick = self.ledger.tick
        self.srats[token_id] = SratToken(
            token_id=token_id,
            holder=consumer,
            service_id=service_id,
            purchase_id=purchase_id,
            minted_tick=tick,
            expiry_tick=tick + self.config.srat_lifetime,
        )
        self.srat_by_purchase[purchase_id] = token_id
        return token_id

    def burn_srat(self, token_id: str) -> str:
        token = self.srats.get(token_id)
        if token is None:
            raise TokenNotActive(f"no such token {token_id}")
        if token.state == EXPIRED:
            raise TokenExpired(token_id)
        if token.state != ACTIVE:
            raise TokenNotActive(f"{token_id} is {token.state}")
        if self.ledger.tick >= token.expiry_tick:
            raise TokenExpired(token_id)
        token.state = BURNED
        return BURNED

    def srat_for_purchase(self, purchase_id: str) -> SratToken | None:
        token_id = self.srat_by_purchase.get(purchase_id)
        return self.srats.get(token_id) if token_id else None

    def srat_usable(self, token: SratToken | None) -> bool:
        return token is not None and token.state == ACTIVE and self.ledger.tick < token.expiry_tick

    # -- SRDT --

    def mint_srdt(self, holder: str, service_id: str) -> str:
        token_id = f"SRDT-{self._next_srdt:05d}"
        self._next_srdt += 1
        tick = self.ledger.tick
        self.srdts[token_id] = SrdtToken(
            token_id=token_id,
            holder=holder,
            service_id=service_id,
            minted_tick=tick,
            expiry_tick=tick + self.config.srdt_lifetime,
            discount_rate=self.config.srdt_discount,
        )
        return token_id

    def consume_srdt(self, token_id: str, purpose: str) -> str:
        if purpose not in (PURPOSE_ENDORSEMENT, PURPOSE_DISCOUNT):
            raise ValidationError(f"unknown consumption purpose {purpose!r}")
        token = self.srdts.get(token_id)
        if token is None:
            raise TokenNotActive(f"no such token {token_id}")
        if token.state == EXPIRED:
            raise TokenExpired(token_id)
        if token.state != ACTIVE:
            raise TokenNotActive(f"{token_id} is {token.state}")
        if self.ledger.tick >= token.expiry_tick:
            raise TokenExpired(token_id)
        token.state = CONSUMED
        token.consumed_for = purpose
        return CONSUMED

    def active_srdt_for(self, holder: str, service_id: str) -> SrdtToken | None:
        """Lowest-id active unexpired SRDT bound to the service, if any."""
        for token_id in sorted(self.srdts):
            token = self.srdts[token_id]
            if (
                token.holder == holder
                and token.service_id == service_id
                and token.state == ACTIVE
                and self.ledger.tick < token.expiry_tick
            ):
                return token
        return None

    # -- DRET --

    def dret_count(self, provider: str) -> int:
        return self.dret.get(provider, 0)

    def award_dret(self, provider: str, service_id: str, authentic_count: int) -> int:
        """Mint one DRET per freshly crossed multiple of the award interval."""
        crossings = authentic_count // self.config.dret_interval
        rewarded = self._dret_rewarded.get(service_id, 0)
        for _ in range(crossings - rewarded):
            self.dret[provider] = self.dret.get(provider, 0) + 1
            self.ledger.append_event(
                "DretAwarded",
                {"provider": provider, "service": service_id, "new_count": self.dret[provider]},
            )
        self._dret_rewarded[service_id] = max(rewarded, crossings)
        return self.dret.get(provider, 0)

    # -- shared lifecycle --

    def expiry_sweep(self, tick: int) -> list[str]:
        """Expire every active token whose expiry tick has been reached."""
        expired = []
        for token_id in sorted(self.srats):
            token = self.srats[token_id]
            if token.state == ACTIVE and token.expiry_tick <= tick:
                token.state = EXPIRED
                expired.append(token_id)
        for token_id in sorted(self.srdts):
            token = self.srdts[token_id]
            if token.state == ACTIVE and token.expiry_tick <= tick:
                token.state = EXPIRED
                expired.append(token_id)
        if expired:
            self.ledger.append_event("TokensExpired", {"tokens": expired})
        return expired

    def void_all(self, holder: str) -> dict:
        """Void every active token a participant holds (exclusion hook)."""
        voided = []
        for token_id in sorted(self.srats):
            token = self.srats[token_id]
            if token.holder == holder and token.state == ACTIVE:
                token.state = VOIDED
                voided.append(token_id)
        for token_id in sorted(self.srdts):
            token = self.srdts[token_id]
            if token.holder == holder and token.state == ACTIVE:
                token.state = VOIDED
                voided.append(token_id)
        return {"voided_tokens": voided}

    def srat_counts(self) -> dict[str, int]:
        counts = {ACTIVE: 0, BURNED: 0, EXPIRED: 0, VOIDED: 0}
        for token in self.srats.values():
            counts[token.state] += 1
        return counts
