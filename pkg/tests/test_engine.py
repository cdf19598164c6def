import hashlib

import numpy as np
import pytest

from coopcsma.engine import (
    AP,
    COLLISION,
    IDLE,
    SUCCESS,
    Accumulators,
    ContentionOutcome,
    CsmaParams,
    EventRecord,
    Segment,
    TransmissionPlan,
    account_event,
    contention_step,
    run_csma,
)
from coopcsma.protocols import DirectLink, ProtocolConfig, make_protocol
from coopcsma.topology import load_rates

from conftest import random_rate_table

PARAMS = CsmaParams(sigma=0.0088, tau=0.004)


def direct_plan(node, rate):
    return TransmissionPlan(node, [Segment(node, 1.0 / rate, AP)])


def test_params_validated():
    with pytest.raises(ValueError):
        CsmaParams(sigma=0.0, tau=0.5)
    with pytest.raises(ValueError):
        CsmaParams(sigma=1.0, tau=0.0)
    with pytest.raises(ValueError):
        CsmaParams(sigma=1.0, tau=1.1)


def test_contention_step_tau_one_single_node():
    rng = np.random.default_rng(0)
    params = CsmaParams(sigma=0.01, tau=1.0)
    for _ in range(5):
        outcome = contention_step([0], lambda k: direct_plan(k, 2.0), params, rng)
        assert outcome.kind == SUCCESS
        assert outcome.elapsed == pytest.approx(0.5)


def test_contention_step_tau_one_two_nodes_always_collide():
    rng = np.random.default_rng(0)
    params = CsmaParams(sigma=0.01, tau=1.0)
    for _ in range(5):
        outcome = contention_step([0, 1], lambda k: direct_plan(k, 1.0 + k), params, rng)
        assert outcome.kind == COLLISION
        # collision occupies the longest first-segment exposure
        assert outcome.elapsed == pytest.approx(1.0)


def test_contention_step_attempt_probability():
    # 32 nodes at tau = 0.004: P(some attempt) = 1 - (1 - tau)^32
    rng = np.random.default_rng(99)
    params = PARAMS
    steps = 200_000
    busy = 0
    plan = lambda k: direct_plan(k, 1.0)
    for _ in range(steps):
        if contention_step(list(range(32)), plan, params, rng).kind != IDLE:
            busy += 1
    expected = 1.0 - (1.0 - params.tau) ** 32
    assert abs(busy / steps - expected) < 0.003


def test_account_idle_only_advances_clock():
    acc = Accumulators.zeros(2)
    account_event(ContentionOutcome(IDLE, [], 0.0088), acc)
    assert acc.clock == pytest.approx(0.0088)
    assert acc.idle_events == 1
    assert acc.transmit_time.sum() == 0
    assert acc.delivered.sum() == 0


def test_account_success_credits_and_charges():
    acc = Accumulators.zeros(2)
    plan = direct_plan(0, 1.0)
    account_event(ContentionOutcome(SUCCESS, [plan], plan.duration), acc, credits=((0, 1),))
    assert acc.clock == pytest.approx(1.0)
    assert acc.transmit_time[0] == pytest.approx(1.0)
    assert acc.delivered[0] == 1
    assert acc.successes == 1


def test_account_two_hop_success_charges_both_transmitters():
    acc = Accumulators.zeros(3)
    plan = TransmissionPlan(
        0,
        [Segment(0, 1.0 / 3.0, 2), Segment(2, 1.0 / 3.0, AP)],
        route="twohop",
    )
    account_event(ContentionOutcome(SUCCESS, [plan], plan.duration), acc, credits=((0, 1),))
    assert acc.clock == pytest.approx(2.0 / 3.0)
    assert acc.transmit_time[0] == pytest.approx(1.0 / 3.0)
    assert acc.transmit_time[2] == pytest.approx(1.0 / 3.0)
    assert acc.delivered[0] == 1
    assert acc.delivered[2] == 0


def test_account_collision_charges_each_collider_its_exposure():
    acc = Accumulators.zeros(2)
    plans = [direct_plan(0, 1.0), direct_plan(1, 3.0)]
    outcome = ContentionOutcome(COLLISION, plans, max(p.collision_exposure for p in plans))
    account_event(outcome, acc)
    assert acc.clock == pytest.approx(1.0)
    assert acc.transmit_time[0] == pytest.approx(1.0)
    assert acc.transmit_time[1] == pytest.approx(1.0 / 3.0)
    assert acc.delivered.sum() == 0
    assert acc.collisions == 1


def test_single_node_tau_one_cycle_is_exact():
    rate = 2.0
    sigma = 0.0088
    rates = load_rates([rate], [[None]])
    protocol = DirectLink(rates)
    result = run_csma(rates, protocol, CsmaParams(sigma=sigma, tau=1.0), seed=5, competitions=1000)
    acc = result.acc
    measured = acc.delivered[0] / acc.clock
    assert measured == pytest.approx(1.0 / (1.0 / rate + sigma), rel=1e-12)
    assert acc.idle_events == 1000  # exactly one mandatory sensing slot per cycle
    assert acc.collisions == 0


def test_single_node_geometric_idle_expectation():
    # cycle = mandatory slot + geometric zero-flip slots + transmission:
    # E[time per delivery] = 1/R + sigma/tau
    rate = 1.7
    tau = 0.21
    sigma = 0.05
    rates = load_rates([rate], [[None]])
    protocol = DirectLink(rates)
    result = run_csma(
        rates, protocol, CsmaParams(sigma=sigma, tau=tau), seed=11, competitions=300_000
    )
    acc = result.acc
    expected = 1.0 / (1.0 / rate + sigma / tau)
    assert acc.delivered[0] / acc.clock == pytest.approx(expected, rel=0.01)


def test_clock_equals_sum_of_event_elapsed_and_energy_identity():
    rng = np.random.default_rng(13)
    rates = random_rate_table(rng, 5)
    protocol = DirectLink(rates)
    seen = {"elapsed": 0.0, "tx": np.zeros(5)}

    def observer(record, outcome):
        seen["elapsed"] += record.elapsed
        if outcome is not None and outcome.kind != IDLE:
            for node, spent in outcome.transmit_times().items():
                seen["tx"][node] += spent

    result = run_csma(
        rates, protocol, CsmaParams(sigma=0.01, tau=0.1), seed=2, competitions=2000, observer=observer
    )
    acc = result.acc
    assert acc.clock == pytest.approx(seen["elapsed"], rel=1e-12)
    assert np.allclose(acc.transmit_time, seen["tx"], rtol=1e-12)
    assert np.all(acc.transmit_time <= acc.clock)
    # total energy = E * total transmit time, by construction of the accounting
    total_energy = rates.tx_power * acc.transmit_time.sum()
    assert total_energy == pytest.approx(float(np.sum(seen["tx"])) * rates.tx_power, rel=1e-12)


def trace_hash(rates, protocol_config, params, seed, competitions):
    digest = hashlib.sha256()

    def observer(record, outcome):
        digest.update(record.line().encode())
        digest.update(b"\n")

    protocol = make_protocol(rates, protocol_config)
    run_csma(rates, protocol, params, seed, competitions, observer=observer)
    return digest.hexdigest()


def test_fixed_seed_reproduces_trace():
    rng = np.random.default_rng(3)
    rates = random_rate_table(rng, 6)
    config = ProtocolConfig("direct")
    a = trace_hash(rates, config, PARAMS, seed=21, competitions=3000)
    b = trace_hash(rates, config, PARAMS, seed=21, competitions=3000)
    c = trace_hash(rates, config, PARAMS, seed=22, competitions=3000)
    assert a == b
    assert a != c


def naive_run(rates, protocol, params, seed, competitions):
    """Per-slot reference loop built on contention_step (oracle for the fast path)."""
    n = rates.n_nodes
    rng = np.random.default_rng(seed)
    acc = Accumulators.zeros(n)
    nodes = list(range(n))
    records = []
    index = 0

    def record(kind, participants, elapsed):
        nonlocal index
        records.append(EventRecord(index, kind, participants, elapsed, acc.clock).line())
        index += 1

    while acc.competitions < competitions:
        mandatory = ContentionOutcome(IDLE, [], params.sigma)
        account_event(mandatory, acc)
        record(IDLE, (), params.sigma)
        while True:
            outcome = contention_step(nodes, protocol.plan, params, rng)
            if outcome.kind == IDLE:
                account_event(outcome, acc)
                record(IDLE, (), outcome.elapsed)
                continue
            break
        if outcome.kind == SUCCESS:
            credits = protocol.on_success(outcome.plans[0])
            account_event(outcome, acc, credits)
            record(SUCCESS, tuple(s.transmitter for s in outcome.plans[0].segments), outcome.elapsed)
        else:
            protocol.on_collision(outcome.plans)
            account_event(outcome, acc)
            record(COLLISION, tuple(p.initiator for p in outcome.plans), outcome.elapsed)
    return acc, records


def test_fast_path_matches_naive_reference_loop():
    rng = np.random.default_rng(7)
    rates = random_rate_table(rng, 4)
    params = CsmaParams(sigma=0.02, tau=0.05)

    fast_records = []

    def observer(record, outcome):
        fast_records.append(record.line())

    protocol = make_protocol(rates, ProtocolConfig("direct"))
    result = run_csma(rates, protocol, params, seed=77, competitions=500, observer=observer)

    reference = make_protocol(rates, ProtocolConfig("direct"))
    ref_acc, ref_records = naive_run(rates, reference, params, seed=77, competitions=500)

    assert fast_records == ref_records
    assert result.acc.clock == pytest.approx(ref_acc.clock, rel=0, abs=0)
    assert np.array_equal(result.acc.transmit_time, ref_acc.transmit_time)
    assert np.array_equal(result.acc.delivered, ref_acc.delivered)


def test_plan_validation():
    with pytest.raises(ValueError):
        TransmissionPlan(0, [])
    with pytest.raises(ValueError):
        TransmissionPlan(0, [Segment(0, 0.0, AP)])


def test_run_requires_positive_budget(toy_rates):
    protocol = DirectLink(toy_rates)
    with pytest.raises(ValueError):
        run_csma(toy_rates, protocol, PARAMS, seed=1, competitions=0)
