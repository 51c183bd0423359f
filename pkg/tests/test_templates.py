from datetime import datetime, timezone

import pytest
from hypothesis import given, strategies as st

from volver.corpus import ContentKind, PageDocument
from volver.errors import DuplicatePriority, NoTemplateMatched
from volver.records import PaperRecord, PersonRecord, VolumeRecord, WorkshopRecord
from volver.templates import (
    Invalid,
    Matched,
    NotApplicable,
    Template,
    TemplateRegistry,
    extract,
    extract_with_winner,
    register_template,
    validate_record,
)


def _page(volume_id=1, body=b"<html></html>"):
    return PageDocument(
        source_iri=f"http://x.test/Vol-{volume_id}/",
        volume_id=volume_id,
        kind=ContentKind.VOLUME_PAGE,
        body=body,
        fetched_at=datetime.now(timezone.utc),
    )


def _record(**overrides):
    base = dict(
        volume_number=1,
        full_title="Proceedings of the Workshop on Testing",
        workshops=[WorkshopRecord("Workshop on Testing")],
        editors=[PersonRecord("Ed Itor", "Editor")],
        papers=[PaperRecord("A Paper", [PersonRecord("Au Thor", "Author")])],
        source_iri="http://x.test/Vol-1/",
    )
    base.update(overrides)
    return VolumeRecord(**base)


def _template(priority, outcome, calls=None, kind=ContentKind.VOLUME_PAGE):
    def matcher(page):
        if calls is not None:
            calls.append(priority)
        return outcome

    return Template(f"t{priority}", kind, priority, matcher)


def test_registration_orders_by_priority():
    registry = TemplateRegistry()
    register_template(registry, _template(2, NotApplicable()))
    register_template(registry, _template(0, NotApplicable()))
    register_template(registry, _template(1, NotApplicable()))
    ids = [t.id for t in registry.templates_for(ContentKind.VOLUME_PAGE)]
    assert ids == ["t0", "t1", "t2"]


def test_duplicate_priority_rejected():
    registry = TemplateRegistry()
    register_template(registry, _template(1, NotApplicable()))
    with pytest.raises(DuplicatePriority):
        register_template(registry, _template(1, NotApplicable()))


def test_first_valid_template_wins_and_later_not_invoked():
    calls = []
    registry = TemplateRegistry()
    register_template(registry, _template(0, NotApplicable(), calls))
    register_template(registry, _template(1, Matched(_record()), calls))
    register_template(registry, _template(2, Matched(_record(full_title="other")), calls))
    record, winner = extract_with_winner(registry, _page())
    assert winner.id == "t1"
    assert record.full_title == "Proceedings of the Workshop on Testing"
    assert calls == [0, 1]  # t2 never consulted


def test_invalid_outcome_falls_through():
    registry = TemplateRegistry()
    register_template(registry, _template(0, Invalid(("editors",))))
    register_template(registry, _template(1, Matched(_record())))
    _, winner = extract_with_winner(registry, _page())
    assert winner.id == "t1"


def test_matched_but_structurally_invalid_falls_through():
    registry = TemplateRegistry()
    register_template(registry, _template(0, Matched(_record(editors=[]))))
    register_template(registry, _template(1, Matched(_record())))
    _, winner = extract_with_winner(registry, _page())
    assert winner.id == "t1"


def test_no_template_matched_collects_reasons():
    registry = TemplateRegistry()
    register_template(registry, _template(0, NotApplicable()))
    register_template(registry, _template(1, Invalid(("papers",))))
    with pytest.raises(NoTemplateMatched) as err:
        extract(registry, _page())
    assert err.value.source_iri == "http://x.test/Vol-1/"
    assert err.value.reasons == [("t0", "not applicable"), ("t1", "invalid: papers")]


def test_empty_registry_raises():
    with pytest.raises(NoTemplateMatched):
        extract(TemplateRegistry(), _page())


def test_validate_record_flags_each_defect():
    assert validate_record(_record()) == []
    assert validate_record(_record(volume_number=0)) == ["volume_number"]
    assert validate_record(_record(full_title="  ")) == ["full_title"]
    assert validate_record(_record(editors=[])) == ["editors"]
    assert validate_record(_record(papers=[])) == ["papers"]
    bad_paper = _record(
        papers=[
            PaperRecord("ok", []),
            PaperRecord("   ", []),
        ]
    )
    assert validate_record(bad_paper) == ["papers[1].title"]


@given(st.permutations([0, 1, 2, 3]))
def test_winner_independent_of_registration_order(order):
    outcomes = {
        0: NotApplicable(),
        1: Invalid(("papers",)),
        2: Matched(_record()),
        3: Matched(_record(full_title="never seen")),
    }
    registry = TemplateRegistry()
    for priority in order:
        register_template(registry, _template(priority, outcomes[priority]))
    _, winner = extract_with_winner(registry, _page())
    assert winner.id == "t2"
