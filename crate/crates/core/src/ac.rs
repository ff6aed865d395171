//! Single-phase AC quantities.
//!
//! Complex power is carried together with its unit scale and the role of the
//! element it describes (a load consuming it or a source supplying it). Shunt
//! reactive power follows the load convention: inductors consume (`Q > 0`),
//! capacitors supply (`Q < 0`), and reactances carry the same sign.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative threshold below which a reactive power is treated as zero
/// when classifying power factors.
pub const REACTIVE_ZERO_REL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcError {
    #[error("power factor {0} outside (0, 1]")]
    PowerFactorOutOfRange(f64),
    #[error("apparent power must be positive, got {0}")]
    NonPositiveApparentPower(f64),
    #[error("unity power factor given together with nonzero reactive power {0}")]
    ContradictorySpec(f64),
    #[error("power factor undefined for zero complex power")]
    ZeroPower,
    #[error("reactance must be nonzero")]
    ZeroReactance,
    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),
    #[error("voltage must be positive, got {0}")]
    NonPositiveVoltage(f64),
    #[error("cannot combine {0} and {1} scale powers")]
    ScaleMismatch(UnitScale, UnitScale),
    #[error("non-finite input")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitScale {
    /// W, VAr, VA
    #[default]
    Base,
    /// MW, MVAr, MVA
    Mega,
}

impl UnitScale {
    pub fn factor(self) -> f64 {
        match self {
            UnitScale::Base => 1.0,
            UnitScale::Mega => 1e6,
        }
    }
}

impl fmt::Display for UnitScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitScale::Base => f.write_str("base"),
            UnitScale::Mega => f.write_str("mega"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    Load,
    Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPower {
    pub p: f64,
    pub q: f64,
    pub scale: UnitScale,
    pub role: Role,
}

impl ComplexPower {
    pub fn new(p: f64, q: f64, scale: UnitScale, role: Role) -> Self {
        ComplexPower { p, q, scale, role }
    }

    pub fn load(p: f64, q: f64, scale: UnitScale) -> Self {
        Self::new(p, q, scale, Role::Load)
    }

    pub fn source(p: f64, q: f64, scale: UnitScale) -> Self {
        Self::new(p, q, scale, Role::Source)
    }

    pub fn with_role(self, role: Role) -> Self {
        ComplexPower { role, ..self }
    }

    pub fn apparent(&self) -> f64 {
        self.p.hypot(self.q)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.p, self.q)
    }

    /// Value in W + jVAr regardless of scale.
    pub fn in_base_units(&self) -> Complex64 {
        self.as_complex() * self.scale.factor()
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0.0 && self.q == 0.0
    }

    /// Adds two powers of the same scale; the role of `self` is kept.
    pub fn checked_add(&self, other: &ComplexPower) -> Result<ComplexPower, AcError> {
        if self.scale != other.scale {
            return Err(AcError::ScaleMismatch(self.scale, other.scale));
        }
        Ok(ComplexPower { p: self.p + other.p, q: self.q + other.q, ..*self })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PfSense {
    Lagging,
    Leading,
}

/// The three ways a load's complex power is stated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum LoadSpec {
    /// `P + jQ` given directly.
    Explicit { p: f64, q: f64 },
    /// Apparent power `S` at a power factor with lag/lead flag.
    Apparent { s: f64, pf: f64, sense: PfSense },
    /// Real power at unity power factor. `q`, when present, must be zero.
    Unity {
        p: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
    },
}

/// Resolves a load spec into a load-role complex power in `scale` units.
pub fn complex_power_from_spec(spec: &LoadSpec, scale: UnitScale) -> Result<ComplexPower, AcError> {
    match *spec {
        LoadSpec::Explicit { p, q } => {
            finite(&[p, q])?;
            Ok(ComplexPower::load(p, q, scale))
        }
        LoadSpec::Apparent { s, pf, sense } => {
            finite(&[s, pf])?;
            if s <= 0.0 {
                return Err(AcError::NonPositiveApparentPower(s));
            }
            check_pf(pf)?;
            let q_mag = s * (1.0 - pf * pf).sqrt();
            let q = match sense {
                PfSense::Lagging => q_mag,
                PfSense::Leading => -q_mag,
            };
            Ok(ComplexPower::load(s * pf, q, scale))
        }
        LoadSpec::Unity { p, q } => {
            finite(&[p])?;
            match q {
                Some(q) if q != 0.0 => Err(AcError::ContradictorySpec(q)),
                _ => Ok(ComplexPower::load(p, 0.0, scale)),
            }
        }
    }
}

fn check_pf(pf: f64) -> Result<(), AcError> {
    if pf > 0.0 && pf <= 1.0 {
        Ok(())
    } else {
        Err(AcError::PowerFactorOutOfRange(pf))
    }
}

fn finite(values: &[f64]) -> Result<(), AcError> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(AcError::NonFinite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QSign {
    Positive,
    Negative,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFactor {
    pub magnitude: f64,
    pub q_sign: QSign,
    pub role: Role,
}

pub fn power_factor(s: &ComplexPower) -> Result<PowerFactor, AcError> {
    finite(&[s.p, s.q])?;
    if s.is_zero() {
        return Err(AcError::ZeroPower);
    }
    let apparent = s.apparent();
    let q_sign = if s.q.abs() <= REACTIVE_ZERO_REL * apparent {
        QSign::Zero
    } else if s.q > 0.0 {
        QSign::Positive
    } else {
        QSign::Negative
    };
    let magnitude = if q_sign == QSign::Zero { 1.0 } else { s.p.abs() / apparent };
    Ok(PowerFactor { magnitude, q_sign, role: s.role })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PfLabel {
    Leading,
    Lagging,
    Unity,
}

impl PfLabel {
    pub fn swapped(self) -> PfLabel {
        match self {
            PfLabel::Leading => PfLabel::Lagging,
            PfLabel::Lagging => PfLabel::Leading,
            PfLabel::Unity => PfLabel::Unity,
        }
    }
}

impl fmt::Display for PfLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PfLabel::Leading => "leading",
            PfLabel::Lagging => "lagging",
            PfLabel::Unity => "unity",
        })
    }
}

/// How source-side power factors are labeled.
///
/// Loads are labeled the same way under both conventions: a load consuming
/// reactive power (`Q > 0`) is lagging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelConvention {
    /// A source supplying reactive power (`Q_s > 0`) is leading.
    #[default]
    SupplyLeading,
    /// Generator convention: a source supplying reactive power is lagging.
    Classical,
}

impl LabelConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelConvention::SupplyLeading => "supply-leading",
            LabelConvention::Classical => "classical",
        }
    }
}

pub fn label_pf(pf: &PowerFactor, convention: LabelConvention) -> PfLabel {
    let positive_label = match (pf.role, convention) {
        (Role::Load, _) => PfLabel::Lagging,
        (Role::Source, LabelConvention::SupplyLeading) => PfLabel::Leading,
        (Role::Source, LabelConvention::Classical) => PfLabel::Lagging,
    };
    match pf.q_sign {
        QSign::Zero => PfLabel::Unity,
        QSign::Positive => positive_label,
        QSign::Negative => positive_label.swapped(),
    }
}

/// Series impedance `r + jx`; `x > 0` is inductive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impedance {
    pub r: f64,
    pub x: f64,
}

impl Impedance {
    pub fn new(r: f64, x: f64) -> Self {
        Impedance { r, x }
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.r, self.x)
    }

    pub fn magnitude(&self) -> f64 {
        self.r.hypot(self.x)
    }

    pub fn admittance(&self) -> Complex64 {
        self.as_complex().inv()
    }

    pub fn from_admittance(y: Complex64) -> Self {
        let z = y.inv();
        Impedance { r: z.re, x: z.im }
    }
}

/// `Z = |V|^2 / S*` for a load drawing `s` at `v_rms` volts. Ohms.
pub fn load_impedance(v_rms: f64, s: &ComplexPower) -> Result<Impedance, AcError> {
    check_voltage(v_rms)?;
    finite(&[s.p, s.q])?;
    if s.is_zero() {
        return Err(AcError::ZeroPower);
    }
    let z = Complex64::new(v_rms * v_rms, 0.0) / s.in_base_units().conj();
    Ok(Impedance { r: z.re, x: z.im })
}

/// Complex power drawn by `z` at `v_rms`, expressed in `scale` units.
pub fn power_into_impedance(v_rms: f64, z: &Impedance, scale: UnitScale) -> ComplexPower {
    let s = (Complex64::new(v_rms * v_rms, 0.0) / z.as_complex().conj()) / scale.factor();
    ComplexPower::load(s.re, s.im, scale)
}

fn check_voltage(v_rms: f64) -> Result<(), AcError> {
    if v_rms.is_finite() && v_rms > 0.0 {
        Ok(())
    } else {
        Err(AcError::NonPositiveVoltage(v_rms))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Inductor,
    Capacitor,
    None,
}

/// A shunt reactive element; capacitors carry negative reactance.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ShuntElement {
    reactance: Option<f64>,
}

impl ShuntElement {
    /// Ratings below this many VAr are reported as no element at all.
    pub const ABSENT_BELOW_VAR: f64 = 1e-9;

    pub fn absent() -> Self {
        ShuntElement { reactance: None }
    }

    pub fn from_reactance(x: f64) -> Result<Self, AcError> {
        finite(&[x])?;
        if x == 0.0 {
            return Err(AcError::ZeroReactance);
        }
        Ok(ShuntElement { reactance: Some(x) })
    }

    pub fn from_optional(x: Option<f64>) -> Result<Self, AcError> {
        x.map_or(Ok(Self::absent()), Self::from_reactance)
    }

    /// Element consuming `q_var` VAr at `v_rms` (negative for a capacitor).
    pub fn from_rating(v_rms: f64, q_var: f64) -> Result<Self, AcError> {
        check_voltage(v_rms)?;
        finite(&[q_var])?;
        if q_var.abs() < Self::ABSENT_BELOW_VAR {
            return Ok(Self::absent());
        }
        Ok(ShuntElement { reactance: Some(reactance_for_reactive_power(v_rms, q_var)?) })
    }

    pub fn reactance(&self) -> Option<f64> {
        self.reactance
    }

    pub fn kind(&self) -> ElementKind {
        match self.reactance {
            None => ElementKind::None,
            Some(x) if x > 0.0 => ElementKind::Inductor,
            Some(_) => ElementKind::Capacitor,
        }
    }

    pub fn is_present(&self) -> bool {
        self.reactance.is_some()
    }
}

/// `Q = V^2 / X`: consumed (positive) by inductors, supplied (negative) by
/// capacitors, zero when the element is absent. VAr.
pub fn shunt_reactive_power(v_rms: f64, element: &ShuntElement) -> Result<f64, AcError> {
    check_voltage(v_rms)?;
    Ok(match element.reactance {
        None => 0.0,
        Some(x) => v_rms * v_rms / x,
    })
}

/// `X = V^2 / Q`, inverse of [`shunt_reactive_power`].
pub fn reactance_for_reactive_power(v_rms: f64, q_var: f64) -> Result<f64, AcError> {
    check_voltage(v_rms)?;
    if q_var == 0.0 {
        return Err(AcError::ZeroPower);
    }
    Ok(v_rms * v_rms / q_var)
}

/// Result of sign-normalizing a reactance that is supposed to be capacitive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub value: f64,
    pub flipped: bool,
}

/// Capacitive reactances are negative; a positive magnitude is flipped.
pub fn normalize_capacitive(x: f64) -> Normalized {
    if x > 0.0 {
        Normalized { value: -x, flipped: true }
    } else {
        Normalized { value: x, flipped: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementValue {
    /// Henries.
    Inductance(f64),
    /// Farads.
    Capacitance(f64),
}

pub fn reactance_to_element(x: f64, f: f64) -> Result<ElementValue, AcError> {
    finite(&[x, f])?;
    if f <= 0.0 {
        return Err(AcError::NonPositiveFrequency(f));
    }
    if x == 0.0 {
        return Err(AcError::ZeroReactance);
    }
    let omega = 2.0 * PI * f;
    Ok(if x > 0.0 {
        ElementValue::Inductance(x / omega)
    } else {
        ElementValue::Capacitance(1.0 / (omega * x.abs()))
    })
}

pub fn element_to_reactance(value: ElementValue, f: f64) -> f64 {
    let omega = 2.0 * PI * f;
    match value {
        ElementValue::Inductance(l) => omega * l,
        ElementValue::Capacitance(c) => -1.0 / (omega * c),
    }
}
