//! Sample models: the running-example FTSs, the alarm families used by the
//! regression scenarios, and a desk-scale infusion pump product line.

use crate::featexpr::{Alphabet, FeatureExpr};
use crate::plmodel::{FeatureModel, Fts, FtsTransition, Lts, State, Transition};

fn fx(s: &str) -> FeatureExpr {
    s.parse().expect("fixture formulas are well-formed")
}

fn fts(
    features: &[&str],
    fm: &str,
    states: &[(&str, &[&str])],
    initial: &str,
    trs: &[(&str, &str, &str, &str)],
) -> Fts {
    let fm = FeatureModel::new(Alphabet::new(features.iter().copied()).unwrap(), fx(fm)).unwrap();
    let states = states
        .iter()
        .map(|(id, labels)| State::new(*id, labels.iter().copied()))
        .collect();
    let trs = trs
        .iter()
        .map(|(s, a, d, pc)| FtsTransition::new(s, a, d, fx(pc)))
        .collect();
    Fts::new(fm, states, initial, trs).expect("fixture models are well-formed")
}

fn lts(states: &[(&str, &[&str])], initial: &str, trs: &[(&str, &str, &str)]) -> Lts {
    let states = states
        .iter()
        .map(|(id, labels)| State::new(*id, labels.iter().copied()))
        .collect();
    let trs = trs
        .iter()
        .map(|(s, a, d)| Transition {
            src: s.to_string(),
            action: a.to_string(),
            dst: d.to_string(),
        })
        .collect();
    Lts::new(states, initial, trs).expect("fixture models are well-formed")
}

const NONE: &[&str] = &[];

/// Three states over `A xor B`; `d` and `c` need A, `b` needs B.
pub fn xor_loop() -> Fts {
    fts(
        &["A", "B"],
        "A xor B",
        &[("s0", NONE), ("s1", NONE), ("s2", NONE)],
        "s0",
        &[
            ("s0", "a", "s1", "true"),
            ("s1", "b", "s0", "B"),
            ("s1", "d", "s2", "A"),
            ("s2", "c", "s0", "A"),
        ],
    )
}

/// [`xor_loop`] with a self-loop `e` on `s2` under A.
pub fn xor_loop_with_self_loop() -> Fts {
    fts(
        &["A", "B"],
        "A xor B",
        &[("s0", NONE), ("s1", NONE), ("s2", NONE)],
        "s0",
        &[
            ("s0", "a", "s1", "true"),
            ("s1", "b", "s0", "B"),
            ("s1", "d", "s2", "A"),
            ("s2", "c", "s0", "A"),
            ("s2", "e", "s2", "A"),
        ],
    )
}

const ALARM: &[&str] = &["Alarm"];
const SAFE: &[&str] = &["Safe"];

fn alarm_family_transitions() -> Vec<(&'static str, &'static str, &'static str, &'static str)> {
    vec![
        ("s0", "raise1", "a1", "A"),
        ("s0", "raise2", "a2", "B"),
        ("s0", "raise3", "a3", "A & B"),
        ("a1", "ack", "ok", "true"),
        ("a2", "ack", "ok", "true"),
        ("a3", "ack", "ok", "true"),
        ("ok", "reset", "s0", "true"),
    ]
}

const ALARM_STATES: &[(&str, &[&str])] = &[
    ("s0", SAFE),
    ("a1", ALARM),
    ("a2", ALARM),
    ("a3", ALARM),
    ("ok", SAFE),
];

/// Alarm product line over {A,B} with Φ = A ∨ B: alarm a1 under A, a2
/// under B, a3 under A ∧ B, each acknowledged into a safe state.
pub fn alarm_family_old() -> Fts {
    fts(
        &["A", "B"],
        "A | B",
        ALARM_STATES,
        "s0",
        &alarm_family_transitions(),
    )
}

/// The alarm family with every configuration valid, including the one
/// without alarms.
pub fn alarm_family_open() -> Fts {
    fts(
        &["A", "B"],
        "true",
        ALARM_STATES,
        "s0",
        &alarm_family_transitions(),
    )
}

/// A change confined to B-products that adds no alarm: a logging detour.
pub fn alarm_family_new() -> Fts {
    let mut states = ALARM_STATES.to_vec();
    states.push(("log", NONE));
    let mut trs = alarm_family_transitions();
    trs.push(("s0", "log", "log", "B"));
    trs.push(("log", "back", "s0", "true"));
    fts(&["A", "B"], "A | B", &states, "s0", &trs)
}

/// A B-change that adds alarm a4 and breaks a2's acknowledgement.
pub fn alarm_family_new_state() -> Fts {
    let mut states = ALARM_STATES.to_vec();
    states.push(("a4", ALARM));
    states.push(("stuck", NONE));
    let mut trs: Vec<_> = alarm_family_transitions()
        .into_iter()
        .filter(|t| t.0 != "a2")
        .collect();
    trs.push(("a2", "ack", "ok", "!B"));
    trs.push(("a2", "hang", "stuck", "B"));
    trs.push(("stuck", "spin", "stuck", "true"));
    trs.push(("s0", "raise4", "a4", "B"));
    trs.push(("a4", "ack", "ok", "true"));
    fts(&["A", "B"], "A | B", &states, "s0", &trs)
}

/// [`alarm_family_new`] extended with a new feature C that contributes alarm a5.
pub fn alarm_family_new_c() -> Fts {
    let mut states = ALARM_STATES.to_vec();
    states.push(("log", NONE));
    states.push(("a5", ALARM));
    let mut trs = alarm_family_transitions();
    trs.push(("s0", "log", "log", "B"));
    trs.push(("log", "back", "s0", "true"));
    trs.push(("s0", "raise5", "a5", "C"));
    trs.push(("a5", "ack", "ok", "true"));
    fts(&["A", "B", "C"], "A | B", &states, "s0", &trs)
}

/// Product LTS with alarms a1..a3, each answered by a safe state.
pub fn alarm_product_old() -> Lts {
    lts(
        &[
            ("s0", SAFE),
            ("a1", ALARM),
            ("a2", ALARM),
            ("a3", ALARM),
            ("safe", SAFE),
        ],
        "s0",
        &[
            ("s0", "raise1", "a1"),
            ("s0", "raise2", "a2"),
            ("s0", "raise3", "a3"),
            ("a1", "ack", "safe"),
            ("a2", "ack", "safe"),
            ("a3", "ack", "safe"),
            ("safe", "reset", "s0"),
        ],
    )
}

/// [`alarm_product_old`] plus a fourth alarm.
pub fn alarm_product_new() -> Lts {
    lts(
        &[
            ("s0", SAFE),
            ("a1", ALARM),
            ("a2", ALARM),
            ("a3", ALARM),
            ("a4", ALARM),
            ("safe", SAFE),
        ],
        "s0",
        &[
            ("s0", "raise1", "a1"),
            ("s0", "raise2", "a2"),
            ("s0", "raise3", "a3"),
            ("s0", "raise4", "a4"),
            ("a1", "ack", "safe"),
            ("a2", "ack", "safe"),
            ("a3", "ack", "safe"),
            ("a4", "ack", "safe"),
            ("safe", "reset", "s0"),
        ],
    )
}

/// Response holds except under B, where the trigger falls into a busy loop.
pub fn response_under_b() -> Fts {
    fts(
        &["A", "B"],
        "true",
        &[
            ("s0", SAFE),
            ("t", ALARM),
            ("safe", SAFE),
            ("busy", NONE),
            ("extra", NONE),
        ],
        "s0",
        &[
            ("s0", "tick", "t", "true"),
            ("t", "ack", "safe", "!B"),
            ("t", "spin", "busy", "B"),
            ("busy", "spin", "busy", "B"),
            ("safe", "reset", "s0", "true"),
            ("s0", "aux", "extra", "A"),
            ("extra", "back", "s0", "A"),
        ],
    )
}

/// The bad after-action pattern (alarm, then infusing) exists only under C.
pub fn after_action_under_c() -> Fts {
    fts(
        &["A", "C"],
        "true",
        &[
            ("s0", SAFE),
            ("t", ALARM),
            ("u", &["Infusing"]),
            ("p", SAFE),
        ],
        "s0",
        &[
            ("s0", "alarm", "t", "true"),
            ("t", "resume", "u", "C"),
            ("t", "pause", "p", "true"),
            ("u", "stop", "s0", "true"),
            ("p", "reset", "s0", "A"),
        ],
    )
}

pub const CIR: &str = "CHECK_INFUSION_RATE";
pub const HW: &str = "HW_MONITORING";
pub const MD: &str = "MULTIPLE_DRUGS";
pub const CDT: &str = "CHECK_DRUG_TYPE";
pub const VD: &str = "VISUAL_DISPLAY";
pub const PI: &str = "PROGRAMMABLE_INFUSION";

pub const PUMP_FM_OLD: &str =
    "HW_MONITORING & (MULTIPLE_DRUGS => CHECK_DRUG_TYPE & VISUAL_DISPLAY)";
pub const PUMP_FM_NEW: &str =
    "HW_MONITORING & (MULTIPLE_DRUGS => CHECK_DRUG_TYPE & VISUAL_DISPLAY) \
     & (PROGRAMMABLE_INFUSION => CHECK_INFUSION_RATE & VISUAL_DISPLAY)";

const INFUSING: &[&str] = &["Infusing"];

fn pump_states() -> Vec<(&'static str, &'static [&'static str])> {
    vec![
        ("Idle", SAFE),
        ("Infusion_NormalOperationS", INFUSING),
        ("Infusion_PausedS", SAFE),
        ("Alrm_DoseRateHardLimitsViolationS", ALARM),
        ("Alrm_HardwareFailureS", ALARM),
        ("Alrm_WrongDrugS", ALARM),
        ("Select_DrugS", NONE),
        ("Check_DrugS", NONE),
        ("Display_SettingsS", NONE),
    ]
}

fn pump_transitions() -> Vec<(&'static str, &'static str, &'static str, &'static str)> {
    vec![
        ("Idle", "start", "Infusion_NormalOperationS", "true"),
        ("Infusion_NormalOperationS", "stop", "Idle", "true"),
        (
            "Infusion_NormalOperationS",
            "Alrm_DoseRateHardLimitsViolationS",
            "Alrm_DoseRateHardLimitsViolationS",
            CIR,
        ),
        (
            "Alrm_DoseRateHardLimitsViolationS",
            "pause",
            "Infusion_PausedS",
            "true",
        ),
        (
            "Infusion_NormalOperationS",
            "Alrm_HardwareFailureS",
            "Alrm_HardwareFailureS",
            HW,
        ),
        ("Alrm_HardwareFailureS", "pause", "Infusion_PausedS", "true"),
        (
            "Infusion_PausedS",
            "resume",
            "Infusion_NormalOperationS",
            "true",
        ),
        ("Infusion_PausedS", "stop", "Idle", "true"),
        ("Idle", "select", "Select_DrugS", MD),
        ("Select_DrugS", "check", "Check_DrugS", CDT),
        ("Select_DrugS", "confirm", "Idle", "true"),
        ("Check_DrugS", "Alrm_WrongDrugS", "Alrm_WrongDrugS", CDT),
        ("Check_DrugS", "accept", "Idle", "true"),
        ("Alrm_WrongDrugS", "reset", "Idle", "true"),
        ("Idle", "settings", "Display_SettingsS", VD),
        ("Display_SettingsS", "back", "Idle", "true"),
    ]
}

/// Infusion pump product line over five features.
pub fn pump_old() -> Fts {
    fts(
        &[CIR, HW, MD, CDT, VD],
        PUMP_FM_OLD,
        &pump_states(),
        "Idle",
        &pump_transitions(),
    )
}

/// The evolved pump: programmable infusion (a new feature with a new alarm)
/// and a history view added to the visual display.
pub fn pump_new() -> Fts {
    let mut states = pump_states();
    states.extend([
        ("Program_RateS", NONE),
        ("Alrm_UnsafeNewRateS", ALARM),
        ("History_ViewS", NONE),
    ]);
    let mut trs = pump_transitions();
    trs.extend([
        ("Infusion_NormalOperationS", "program", "Program_RateS", PI),
        ("Program_RateS", "apply", "Infusion_NormalOperationS", PI),
        (
            "Program_RateS",
            "Alrm_UnsafeNewRateS",
            "Alrm_UnsafeNewRateS",
            "PROGRAMMABLE_INFUSION & CHECK_INFUSION_RATE",
        ),
        ("Alrm_UnsafeNewRateS", "pause", "Infusion_PausedS", "true"),
        ("Display_SettingsS", "history", "History_ViewS", VD),
        ("History_ViewS", "back", "Display_SettingsS", "true"),
    ]);
    fts(
        &[CIR, HW, MD, CDT, VD, PI],
        PUMP_FM_NEW,
        &states,
        "Idle",
        &trs,
    )
}
