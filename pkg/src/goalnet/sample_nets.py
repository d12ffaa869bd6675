"""Reusable example documents.

``sdlc_document`` rebuilds the simplified waterfall software-lifecycle net
used throughout the docs and tests. The two teachable-agent nets exercise
the interpreter: a cyclic main routine that branches on external events vs
intrinsic motivation, and an affect subnet that assesses desire,
relationship, and relevance before generating an emotion.

Builders take a seed so documents (including every UUID) are byte-stable
across processes.
"""
from __future__ import annotations

import random

from .model import (
    AssociationKind,
    GoalNetDocument,
    Point,
    StateKind,
    TransitionKind,
    create_goal_net,
)


def sdlc_document(with_properties: bool = True, creator: str = "lisiyao",
                  seed: int = 1) -> GoalNetDocument:
    """The waterfall SDLC net: one composite holding a linear chain.

    With ``with_properties=False`` the net-level root/start/end are left
    unset, which is the state right after drawing and before configuring
    the Goal Net properties.
    """
    rng = random.Random(seed)
    doc = create_goal_net("SDLC", "Waterfall software development lifecycle",
                          creator, rng=rng)
    sdlc = doc.add_state(None, "SDLC", StateKind.COMPOSITE, Point(320, 40))

    start = doc.add_state(sdlc, "Start", StateKind.ATOMIC, Point(60, 160))
    designed = doc.add_state(sdlc, "Software Designed", StateKind.ATOMIC, Point(240, 160))
    implemented = doc.add_state(sdlc, "Software Implemented", StateKind.ATOMIC, Point(420, 160))
    end = doc.add_state(sdlc, "End", StateKind.ATOMIC, Point(600, 160))

    design = doc.add_transition(sdlc, "Design Software", TransitionKind.DIRECT, Point(150, 160))
    implement = doc.add_transition(sdlc, "Implement Software", TransitionKind.DIRECT, Point(330, 160))
    test = doc.add_transition(sdlc, "Test Software", TransitionKind.DIRECT, Point(510, 160))

    chain = [start, design, designed, implement, implemented, test, end]
    for a, b in zip(chain, chain[1:]):
        doc.add_arc(doc.ref(a), doc.ref(b))

    doc.set_composite_boundaries(sdlc, start, end)

    do_design = doc.add_task("Do Design", "Produce the software design")
    draw_uml = doc.add_function("Draw UML", "", "design.uml")
    review = doc.add_function("Review Design", "", "design.review")
    doc.associate(AssociationKind.TRANSITION_TASK, design, do_design)
    doc.associate(AssociationKind.TASK_FUNCTION, do_design, draw_uml)
    doc.associate(AssociationKind.TASK_FUNCTION, do_design, review)

    record = doc.add_function("Record Progress", "", "progress.record")
    doc.associate(AssociationKind.STATE_FUNCTION, designed, record)

    if with_properties:
        doc.set_net_properties(root=sdlc, start=start, end=end)
    return doc


# Blackboards under which the two teachable-agent nets run to completion
# with stub functions (nothing mutates the blackboard during the run).
TA_BLACKBOARD = {"external_event": False, "satisfied": True}
AFFECT_BLACKBOARD = {"desire": 0.8, "relationship": 0.4, "relevance": 0.6}


def ta_main_routine(creator: str = "lisiyao", seed: int = 2) -> GoalNetDocument:
    """Cyclic main routine of the teachable agent.

    From Ready, a conditional transition either responds to an external
    event or defers to intrinsic motivation; a probabilistic transition
    picks one of the three sub-goals; afterwards a conditional reflection
    either loops back to Ready or finishes.
    """
    rng = random.Random(seed)
    doc = create_goal_net("TA Main Routine", "Top-level goal hierarchy of the teachable agent",
                          creator, rng=rng)
    root = doc.add_state(None, "Be a Teachable Agent", StateKind.COMPOSITE, Point(400, 30))

    start = doc.add_state(root, "Start", StateKind.ATOMIC, Point(60, 200))
    ready = doc.add_state(root, "Ready", StateKind.ATOMIC, Point(200, 200))
    responded = doc.add_state(root, "Event Handled", StateKind.ATOMIC, Point(360, 80))
    reflected = doc.add_state(root, "Cycle Done", StateKind.ATOMIC, Point(620, 200))
    end = doc.add_state(root, "End", StateKind.ATOMIC, Point(760, 200))

    sub_goals = {}
    for i, name in enumerate(("To Learn", "To Practice", "To Be Affective")):
        sub = doc.add_state(root, name, StateKind.COMPOSITE, Point(360, 200 + 90 * i))
        sub_start = doc.add_state(sub, f"{name} Start", StateKind.ATOMIC, Point(340, 230 + 90 * i))
        sub_done = doc.add_state(sub, f"{name} Done", StateKind.ATOMIC, Point(420, 230 + 90 * i))
        pursue = doc.add_transition(sub, f"Pursue {name}", TransitionKind.DIRECT,
                                    Point(380, 230 + 90 * i))
        doc.add_arc(doc.ref(sub_start), doc.ref(pursue))
        doc.add_arc(doc.ref(pursue), doc.ref(sub_done))
        doc.set_composite_boundaries(sub, sub_start, sub_done)
        sub_goals[name] = sub

    get_ready = doc.add_transition(root, "Get Ready", TransitionKind.DIRECT, Point(130, 200))
    sense = doc.add_transition(root, "Sense Environment", TransitionKind.CONDITIONAL, Point(280, 140))
    select = doc.add_transition(root, "Select Intrinsic Goal", TransitionKind.PROBABILISTIC, Point(280, 280))
    reflect = doc.add_transition(root, "Reflect", TransitionKind.DIRECT, Point(540, 200))
    loop = doc.add_transition(root, "Continue", TransitionKind.CONDITIONAL, Point(690, 200))

    doc.add_arc(doc.ref(start), doc.ref(get_ready))
    doc.add_arc(doc.ref(get_ready), doc.ref(ready))

    doc.add_arc(doc.ref(ready), doc.ref(sense))
    respond_arc = doc.add_arc(doc.ref(sense), doc.ref(responded))
    intrinsic_arc = doc.add_arc(doc.ref(sense), doc.ref(sub_goals["To Be Affective"]))
    doc.update_properties(respond_arc, guard="external_event == true", priority=0)
    doc.update_properties(intrinsic_arc, priority=1)  # unguarded default

    doc.add_arc(doc.ref(sub_goals["To Be Affective"]), doc.ref(select))
    for i, name in enumerate(("To Learn", "To Practice")):
        arc = doc.add_arc(doc.ref(select), doc.ref(sub_goals[name]))
        doc.update_properties(arc, weight=(0.7 if i == 0 else 0.3))
        done_arc = doc.add_arc(doc.ref(sub_goals[name]), doc.ref(reflect))
        doc.update_properties(done_arc, priority=i)

    doc.add_arc(doc.ref(responded), doc.ref(reflect))
    doc.add_arc(doc.ref(reflect), doc.ref(reflected))

    doc.add_arc(doc.ref(reflected), doc.ref(loop))
    finish_arc = doc.add_arc(doc.ref(loop), doc.ref(end))
    again_arc = doc.add_arc(doc.ref(loop), doc.ref(ready))
    doc.update_properties(finish_arc, guard="satisfied == true", priority=0)
    doc.update_properties(again_arc, priority=1)  # cycle back by default

    for transition_id in list(doc.transitions):
        task = doc.add_task(f"Task for {doc.transitions[transition_id].name}", "")
        fn = doc.add_function(f"Fn {doc.transitions[transition_id].name}", "",
                              f"ta.{transition_id[:8]}")
        doc.associate(AssociationKind.TRANSITION_TASK, transition_id, task)
        doc.associate(AssociationKind.TASK_FUNCTION, task, fn)

    doc.set_composite_boundaries(root, start, end)
    doc.set_net_properties(root=root, start=start, end=end)
    return doc


def affect_subnet(creator: str = "lisiyao", seed: int = 3) -> GoalNetDocument:
    """The affectivability subnet: three assessments, then emotion generation."""
    rng = random.Random(seed)
    doc = create_goal_net("To Be Affective", "Affect generation subnet of the teachable agent",
                          creator, rng=rng)
    root = doc.add_state(None, "Affect", StateKind.COMPOSITE, Point(400, 30))

    names = ["Start", "Desire Assessed", "Relationship Assessed", "Relevance Assessed"]
    states = [doc.add_state(root, name, StateKind.ATOMIC, Point(80 + 160 * i, 160))
              for i, name in enumerate(names)]
    positive = doc.add_state(root, "Positive Emotion", StateKind.ATOMIC, Point(720, 100))
    negative = doc.add_state(root, "Negative Emotion", StateKind.ATOMIC, Point(720, 220))
    end = doc.add_state(root, "End", StateKind.ATOMIC, Point(880, 160))

    assessments = [
        ("Assess Desire", "assess.desire"),
        ("Assess Relationship", "assess.relationship"),
        ("Assess Relevance", "assess.relevance"),
    ]
    previous = states[0]
    for i, (label, key) in enumerate(assessments):
        transition = doc.add_transition(root, label, TransitionKind.DIRECT,
                                        Point(160 + 160 * i, 160))
        doc.add_arc(doc.ref(previous), doc.ref(transition))
        doc.add_arc(doc.ref(transition), doc.ref(states[i + 1]))
        task = doc.add_task(f"Do {label}", "")
        fn = doc.add_function(label.replace(" ", ""), "Rule-based assessment", key)
        doc.associate(AssociationKind.TRANSITION_TASK, transition, task)
        doc.associate(AssociationKind.TASK_FUNCTION, task, fn)
        previous = states[i + 1]

    generate = doc.add_transition(root, "Generate Emotion", TransitionKind.CONDITIONAL,
                                  Point(640, 160))
    doc.add_arc(doc.ref(previous), doc.ref(generate))
    joy_arc = doc.add_arc(doc.ref(generate), doc.ref(positive))
    sad_arc = doc.add_arc(doc.ref(generate), doc.ref(negative))
    doc.update_properties(joy_arc, guard="desire >= 0.5 && relevance >= 0.5", priority=0)
    doc.update_properties(sad_arc, priority=1)
    emotion_task = doc.add_task("Generate Emotion", "")
    emotion_fn = doc.add_function("GenerateEmotion", "", "emotion.v1")
    doc.associate(AssociationKind.TRANSITION_TASK, generate, emotion_task)
    doc.associate(AssociationKind.TASK_FUNCTION, emotion_task, emotion_fn)

    express = doc.add_transition(root, "Express Emotion", TransitionKind.DIRECT, Point(800, 160))
    doc.add_arc(doc.ref(positive), doc.ref(express))
    doc.add_arc(doc.ref(negative), doc.ref(express))
    doc.add_arc(doc.ref(express), doc.ref(end))
    express_task = doc.add_task("Express Emotion", "")
    doc.associate(AssociationKind.TRANSITION_TASK, express, express_task)

    doc.set_composite_boundaries(root, states[0], end)
    doc.set_net_properties(root=root, start=states[0], end=end)
    return doc
