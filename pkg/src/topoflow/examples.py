"""Two shipped example models.

``meeting_model`` is a five-stage meeting organization process whose token
is the meeting itself: the meeting enters the process while staying a member
of the Meeting circle (duplication dot on the entry arc), then collects
participants, proposed dates, a selected date and a room as instance links.

``education_model`` is a teaching evaluation: a main process owned by the
Faculty with one stage delegated to a Teacher, plus an external directives
process owned by University Headquarters. Directives feed the form-design
stage as labeled input and keep their membership in the directives list.

Both models lint clean and drive the end-to-end test suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    DotKind,
    Model,
    RelationKind,
    add_circle,
    add_node,
    add_relation,
    connect_arc,
    insert_dot,
    instantiate_association,
    place_star,
    star_of,
)
from .services import bind_service, duplicate_to, forward, link, wait


@dataclass
class MeetingExample:
    model: Model = field(default_factory=Model)
    meeting_class: int = 0
    meeting_circle: int = 0
    person_circle: int = 0
    date_circle: int = 0
    room_circle: int = 0
    participant_circle: int = 0
    vip: int = 0
    persons: list[int] = field(default_factory=list)
    dates: list[int] = field(default_factory=list)
    room: int = 0
    start: int = 0
    stages: list[int] = field(default_factory=list)  # the five stages in order
    arcs: list[int] = field(default_factory=list)
    entry_dot: int = 0
    organizer: int = 0
    assoc_participants: int = 0
    assoc_proposed_dates: int = 0
    assoc_selected_date: int = 0
    assoc_room: int = 0
    binding: int = 0
    root_pilot: int = 0


def meeting_model() -> MeetingExample:
    ex = MeetingExample()
    m = ex.model

    ex.meeting_class = add_node(m, "Meeting")
    m.nodes[ex.meeting_class].attributes["subject"] = "text"
    ex.meeting_circle = add_circle(m, ex.meeting_class, "Meeting")
    person_class = add_node(m, "Person")
    m.nodes[person_class].attributes["name"] = "text"
    ex.person_circle = add_circle(m, person_class, "Person")
    date_class = add_node(m, "Date")
    m.nodes[date_class].attributes["when"] = "text"
    ex.date_circle = add_circle(m, date_class, "Date")
    room_class = add_node(m, "Room")
    m.nodes[room_class].attributes["capacity"] = "text"
    ex.room_circle = add_circle(m, room_class, "Room")

    ex.vip = add_node(m, "VIP meeting")
    place_star(m, ex.vip, ex.meeting_circle)
    for name in ("p1", "p2", "p3"):
        person = add_node(m, name)
        place_star(m, person, ex.person_circle)
        ex.persons.append(person)
    for name in ("d1", "d2"):
        date = add_node(m, name)
        place_star(m, date, ex.date_circle)
        ex.dates.append(date)
    ex.room = add_node(m, "r1")
    place_star(m, ex.room, ex.room_circle)

    ex.start = add_node(m, "Start")
    names = (
        "Initialisation",
        "Select participants",
        "Propose date",
        "Select date",
        "Reserve room",
    )
    ex.stages = [add_node(m, name) for name in names]
    chain = [ex.start] + ex.stages
    ex.arcs = [connect_arc(m, a, b) for a, b in zip(chain, chain[1:])]

    ex.entry_dot = add_node(m, "meeting entry", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, ex.arcs[0], ex.entry_dot)
    entry_contents = add_circle(m, ex.entry_dot, "contents")
    add_relation(m, RelationKind.ASSOCIATION, entry_contents, ex.meeting_circle)

    select_participants = ex.stages[1]
    ex.participant_circle = add_circle(m, select_participants, "Participant")

    ex.assoc_participants = add_relation(
        m, RelationKind.ASSOCIATION, ex.meeting_circle, ex.person_circle, multiplicity="0..*"
    )
    ex.assoc_proposed_dates = add_relation(
        m, RelationKind.ASSOCIATION, ex.meeting_circle, ex.date_circle, multiplicity="0..*"
    )
    ex.assoc_selected_date = add_relation(
        m, RelationKind.ASSOCIATION, ex.meeting_circle, ex.date_circle, multiplicity="0..1"
    )
    ex.assoc_room = add_relation(
        m, RelationKind.ASSOCIATION, ex.meeting_circle, ex.room_circle, multiplicity="0..1"
    )

    ex.organizer = add_node(m, "Organizer")
    ex.root_pilot = add_relation(
        m, RelationKind.PILOT, ex.organizer, ex.start, root_flag=True
    )
    ex.binding = add_relation(
        m, RelationKind.FLOW_BINDING, ex.meeting_circle, ex.arcs[0]
    )

    bind_service(m, ex.organizer, ex.start, [forward()])
    bind_service(
        m, ex.organizer, select_participants,
        [link(ex.assoc_participants, "p*"), duplicate_to(ex.participant_circle), forward()],
    )
    bind_service(m, ex.organizer, ex.stages[2], [link(ex.assoc_proposed_dates, "d*"), forward()])
    bind_service(m, ex.organizer, ex.stages[3], [link(ex.assoc_selected_date, "d1"), forward()])
    bind_service(m, ex.organizer, ex.stages[4], [link(ex.assoc_room, "r1"), forward()])
    return ex


@dataclass
class EducationExample:
    model: Model = field(default_factory=Model)
    evaluation_circle: int = 0
    forms_circle: int = 0
    directives_circle: int = 0
    results_circle: int = 0
    lessons_circle: int = 0
    evaluation: int = 0
    form: int = 0
    directive: int = 0
    result_sheet: int = 0
    lesson: int = 0
    start: int = 0
    design: int = 0
    printing: int = 0
    distribution: int = 0
    processing: int = 0
    sending: int = 0
    revision: int = 0
    definition: int = 0
    main_arcs: list[int] = field(default_factory=list)
    external_arc: int = 0
    entry_dot: int = 0
    directives_dot: int = 0
    faculty: int = 0
    headquarters: int = 0
    teacher: int = 0
    assoc_form: int = 0
    assoc_result: int = 0
    assoc_lesson: int = 0
    binding_evaluation: int = 0
    binding_directives: int = 0
    faculty_service: int = 0


def education_model() -> EducationExample:
    ex = EducationExample()
    m = ex.model

    evaluation_class = add_node(m, "Evaluation")
    m.nodes[evaluation_class].attributes["term"] = "text"
    ex.evaluation_circle = add_circle(m, evaluation_class, "Evaluation")
    form_class = add_node(m, "Form")
    m.nodes[form_class].attributes["layout"] = "text"
    ex.forms_circle = add_circle(m, form_class, "Forms")
    directive_class = add_node(m, "Directive")
    m.nodes[directive_class].attributes["issuer"] = "text"
    ex.directives_circle = add_circle(m, directive_class, "Directives")
    result_class = add_node(m, "Evaluation result")
    ex.results_circle = add_circle(m, result_class, "Evaluation results")
    lesson_class = add_node(m, "Lesson")
    m.nodes[lesson_class].attributes["code"] = "text"
    ex.lessons_circle = add_circle(m, lesson_class, "Lessons")

    ex.evaluation = add_node(m, "Algebra evaluation")
    place_star(m, ex.evaluation, ex.evaluation_circle)
    ex.form = add_node(m, "Standard form")
    place_star(m, ex.form, ex.forms_circle)
    ex.directive = add_node(m, "Directive 7")
    place_star(m, ex.directive, ex.directives_circle)
    ex.result_sheet = add_node(m, "Result sheet")
    place_star(m, ex.result_sheet, ex.results_circle)
    ex.lesson = add_node(m, "Algebra")
    place_star(m, ex.lesson, ex.lessons_circle)

    ex.start = add_node(m, "Start evaluation")
    ex.design = add_node(m, "Definition of evaluation form")
    ex.printing = add_node(m, "Printing and sending of forms")
    ex.distribution = add_node(m, "Distribution of forms")
    ex.processing = add_node(m, "Form processing")
    ex.sending = add_node(m, "Sending of results")
    chain = [ex.start, ex.design, ex.printing, ex.distribution, ex.processing, ex.sending]
    ex.main_arcs = [connect_arc(m, a, b) for a, b in zip(chain, chain[1:])]

    ex.revision = add_node(m, "Directives revision")
    ex.definition = add_node(m, "Definition of directives")
    ex.external_arc = connect_arc(m, ex.revision, ex.definition)

    # the design stage consumes directives: a duplication dot on the entry arc,
    # labeled with the directives circle as its contents
    ex.entry_dot = add_node(m, "directives input", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, ex.main_arcs[0], ex.entry_dot)
    entry_contents = add_circle(m, ex.entry_dot, "contents")
    add_relation(m, RelationKind.ASSOCIATION, entry_contents, ex.directives_circle)

    forms_label = add_node(m, "forms flow", dot_kind=DotKind.LABEL)
    insert_dot(m, ex.main_arcs[2], forms_label)
    forms_contents = add_circle(m, forms_label, "contents")
    add_relation(m, RelationKind.ASSOCIATION, forms_contents, ex.forms_circle)

    results_label = add_node(m, "results flow", dot_kind=DotKind.LABEL)
    insert_dot(m, ex.main_arcs[4], results_label)
    results_contents = add_circle(m, results_label, "contents")
    add_relation(m, RelationKind.ASSOCIATION, results_contents, ex.results_circle)

    # directives stay in their list while the external process defines them
    ex.directives_dot = add_node(m, "directives retained", dot_kind=DotKind.DUPLICATE)
    insert_dot(m, ex.external_arc, ex.directives_dot)

    ex.assoc_form = add_relation(
        m, RelationKind.ASSOCIATION, ex.evaluation_circle, ex.forms_circle, multiplicity="1"
    )
    ex.assoc_result = add_relation(
        m, RelationKind.ASSOCIATION, ex.evaluation_circle, ex.results_circle, multiplicity="0..1"
    )
    ex.assoc_lesson = add_relation(
        m, RelationKind.ASSOCIATION, ex.evaluation_circle, ex.lessons_circle, multiplicity="1"
    )
    instantiate_association(
        m, ex.assoc_lesson,
        star_of(m, ex.evaluation, ex.evaluation_circle),
        star_of(m, ex.lesson, ex.lessons_circle),
    )

    ex.faculty = add_node(m, "Faculty")
    add_relation(m, RelationKind.PILOT, ex.faculty, ex.start, root_flag=True)
    ex.headquarters = add_node(m, "University Headquarters")
    add_relation(m, RelationKind.PILOT, ex.headquarters, ex.revision, root_flag=True)
    ex.teacher = add_node(m, "Teacher")
    add_relation(m, RelationKind.PILOT, ex.teacher, ex.distribution)

    ex.binding_evaluation = add_relation(
        m, RelationKind.FLOW_BINDING, ex.evaluation_circle, ex.main_arcs[0]
    )
    ex.binding_directives = add_relation(
        m, RelationKind.FLOW_BINDING, ex.directives_circle, ex.external_arc
    )

    ex.faculty_service = bind_service(m, ex.faculty, ex.start, [forward()])
    bind_service(m, ex.faculty, ex.design, [link(ex.assoc_form, "*"), forward()])
    bind_service(m, ex.faculty, ex.processing, [link(ex.assoc_result, "*"), forward()])
    bind_service(m, ex.teacher, ex.distribution, [wait(2.0), forward()])
    bind_service(m, ex.headquarters, ex.revision, [forward()])
    return ex
