//! Geometry of the two giant atoms, topology classification and the
//! characteristic quantities (Lamb shifts, decays, exchange coupling).
//!
//! Units: group velocity 1, rates in the same unit as `rate_unit`. Positions
//! are stored as phases `θ = ω_a x / v_g` (Markov approximation), so every
//! propagation phase is a difference of two `phase` values.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::real::{cis, Cplx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("atom {atom} point {index}: rate {value} must be finite and non-negative")]
    BadRate { atom: AtomLabel, index: usize, value: f64 },
    #[error("atom {atom} point {index}: phase {value} is not finite")]
    BadPhase { atom: AtomLabel, index: usize, value: f64 },
    #[error("atom {atom}: left point phase {left} exceeds right point phase {right}")]
    Unordered { atom: AtomLabel, left: f64, right: f64 },
    #[error("atom b owns the leftmost coupling point (b1 = {b1} < a1 = {a1}); relabel the atoms")]
    Labeling { a1: f64, b1: f64 },
    #[error("rate_unit must be finite and positive, got {0}")]
    BadRateUnit(f64),
    #[error("delta_ab must be finite, got {0}")]
    BadDetuning(f64),
    #[error("symmetric spacing phi must be finite and non-negative, got {0}")]
    BadSpacing(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AtomLabel {
    A,
    B,
}

impl fmt::Display for AtomLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AtomLabel::A => "a",
            AtomLabel::B => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingPoint<T> {
    /// `θ_jn = ω_a x_jn / v_g`.
    pub phase: T,
    /// Bare decay rate `γ_jn` through this point.
    pub rate: T,
}

impl<T: Real> CouplingPoint<T> {
    pub fn new(phase: T, rate: T) -> Self {
        Self { phase, rate }
    }

    /// Coupling strength `V = sqrt(γ/2)` (group velocity 1).
    pub fn strength(&self) -> T {
        (self.rate / T::lit(2.0)).sqrt()
    }
}

/// A two-level emitter with two coupling points, ordered left to right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GiantAtom<T> {
    pub points: [CouplingPoint<T>; 2],
}

impl<T: Real> GiantAtom<T> {
    pub fn new(left: CouplingPoint<T>, right: CouplingPoint<T>) -> Self {
        Self {
            points: [left, right],
        }
    }

    /// Shorthand from `(phase, rate)` pairs.
    pub fn from_pairs(left: (T, T), right: (T, T)) -> Self {
        Self::new(CouplingPoint::new(left.0, left.1), CouplingPoint::new(right.0, right.1))
    }

    pub fn left(&self) -> CouplingPoint<T> {
        self.points[0]
    }

    pub fn right(&self) -> CouplingPoint<T> {
        self.points[1]
    }

    /// `s_j = Σ_n sqrt(γ_jn) e^{iθ_jn}`; `|s_j|² = Γ_j` and `arg s_j² = α_j`.
    pub fn phasor(&self) -> Cplx<T> {
        self.points.iter().map(|p| cis(p.phase) * p.rate.sqrt()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<T> {
    pub atom_a: GiantAtom<T>,
    pub atom_b: GiantAtom<T>,
    /// `Δ_ab = ω_a − ω_b`, so `Δ_b = Δ_a + Δ_ab`.
    pub delta_ab: T,
    /// Reference rate `γ` used to scale tolerances.
    pub rate_unit: T,
}

/// One coupling point tagged with its owner, as seen in position order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedPoint<T> {
    pub atom: AtomLabel,
    pub index: usize,
    pub point: CouplingPoint<T>,
}

impl<T: Real> SystemConfig<T> {
    /// Builds and validates a configuration with `rate_unit = 1`.
    pub fn new(atom_a: GiantAtom<T>, atom_b: GiantAtom<T>, delta_ab: T) -> Result<Self, ModelError> {
        let cfg = Self {
            atom_a,
            atom_b,
            delta_ab,
            rate_unit: T::one(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_rate_unit(mut self, rate_unit: T) -> Result<Self, ModelError> {
        self.rate_unit = rate_unit;
        self.validate()?;
        Ok(self)
    }

    pub fn with_delta_ab(mut self, delta_ab: T) -> Result<Self, ModelError> {
        self.delta_ab = delta_ab;
        self.validate()?;
        Ok(self)
    }

    pub fn atom(&self, label: AtomLabel) -> &GiantAtom<T> {
        match label {
            AtomLabel::A => &self.atom_a,
            AtomLabel::B => &self.atom_b,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (label, atom) in [(AtomLabel::A, &self.atom_a), (AtomLabel::B, &self.atom_b)] {
            for (index, p) in atom.points.iter().enumerate() {
                if !p.phase.is_finite() {
                    return Err(ModelError::BadPhase {
                        atom: label,
                        index,
                        value: p.phase.to_f64_lossy(),
                    });
                }
                if !(p.rate.is_finite() && p.rate >= T::zero()) {
                    return Err(ModelError::BadRate {
                        atom: label,
                        index,
                        value: p.rate.to_f64_lossy(),
                    });
                }
            }
            if atom.left().phase > atom.right().phase {
                return Err(ModelError::Unordered {
                    atom: label,
                    left: atom.left().phase.to_f64_lossy(),
                    right: atom.right().phase.to_f64_lossy(),
                });
            }
        }
        if self.atom_b.left().phase < self.atom_a.left().phase {
            return Err(ModelError::Labeling {
                a1: self.atom_a.left().phase.to_f64_lossy(),
                b1: self.atom_b.left().phase.to_f64_lossy(),
            });
        }
        if !(self.rate_unit.is_finite() && self.rate_unit > T::zero()) {
            return Err(ModelError::BadRateUnit(self.rate_unit.to_f64_lossy()));
        }
        if !self.delta_ab.is_finite() {
            return Err(ModelError::BadDetuning(self.delta_ab.to_f64_lossy()));
        }
        Ok(())
    }

    /// The four coupling points sorted by phase (stable: a before b on ties).
    pub fn points_in_order(&self) -> [PlacedPoint<T>; 4] {
        let mut pts = [
            PlacedPoint { atom: AtomLabel::A, index: 0, point: self.atom_a.points[0] },
            PlacedPoint { atom: AtomLabel::A, index: 1, point: self.atom_a.points[1] },
            PlacedPoint { atom: AtomLabel::B, index: 0, point: self.atom_b.points[0] },
            PlacedPoint { atom: AtomLabel::B, index: 1, point: self.atom_b.points[1] },
        ];
        pts.sort_by(|x, y| x.point.phase.partial_cmp(&y.point.phase).expect("finite phases"));
        pts
    }

    /// `(Δ_a, Δ_b)` for a probe at atom-a detuning `delta_a`.
    pub fn detunings(&self, delta_a: T) -> (T, T) {
        (delta_a, delta_a + self.delta_ab)
    }

    /// Adds `shift` to every phase.
    pub fn shifted(&self, shift: T) -> Self {
        let mut out = *self;
        for atom in [&mut out.atom_a, &mut out.atom_b] {
            for p in atom.points.iter_mut() {
                p.phase = p.phase + shift;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Separate,
    Braided,
    Nested,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Separate, Topology::Braided, Topology::Nested];

    pub fn name(self) -> &'static str {
        match self {
            Topology::Separate => "separate",
            Topology::Braided => "braided",
            Topology::Nested => "nested",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "separate" => Ok(Topology::Separate),
            "braided" => Ok(Topology::Braided),
            "nested" => Ok(Topology::Nested),
            other => Err(format!("unknown topology {other:?} (expected separate, braided or nested)")),
        }
    }
}

/// Interleaving class of the four coupling points. Ties go to nested first,
/// then separate.
pub fn classify_topology<T: Real>(cfg: &SystemConfig<T>) -> Result<Topology, ModelError> {
    cfg.validate()?;
    let a2 = cfg.atom_a.right().phase;
    let b1 = cfg.atom_b.left().phase;
    let b2 = cfg.atom_b.right().phase;
    Ok(if b2 <= a2 {
        Topology::Nested
    } else if a2 <= b1 {
        Topology::Separate
    } else {
        Topology::Braided
    })
}

/// Characteristic quantities of a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharQuantities<T> {
    /// Lamb shifts `Δ_L,a`, `Δ_L,b`.
    pub lamb_a: T,
    pub lamb_b: T,
    /// Individual decays `Γ_a`, `Γ_b`.
    pub gamma_a: T,
    pub gamma_b: T,
    /// Exchange interaction.
    pub g_ab: T,
    /// Collective decay.
    pub gamma_ab: T,
    /// Phase factors `α_j` in radians.
    pub alpha_a: T,
    pub alpha_b: T,
    /// Coupling phasors `s_j = Σ_n sqrt(γ_jn) e^{iθ_jn}`.
    pub phasor_a: Cplx<T>,
    pub phasor_b: Cplx<T>,
}

pub fn characteristics<T: Real>(cfg: &SystemConfig<T>) -> Result<CharQuantities<T>, ModelError> {
    cfg.validate()?;
    let half = T::lit(0.5);
    let lamb = |atom: &GiantAtom<T>| {
        let (p, q) = (atom.left(), atom.right());
        (p.rate * q.rate).sqrt() * (q.phase - p.phase).abs().sin()
    };
    let pair_sum = |x: &GiantAtom<T>, y: &GiantAtom<T>, f: &dyn Fn(T, T) -> T| -> T {
        let mut s = T::zero();
        for p in &x.points {
            for q in &y.points {
                s = s + (p.rate * q.rate).sqrt() * f(p.phase, q.phase);
            }
        }
        s
    };
    let decay = |atom: &GiantAtom<T>| pair_sum(atom, atom, &|x, y| (x - y).cos());
    let alpha = |atom: &GiantAtom<T>| {
        let sn = pair_sum(atom, atom, &|x, y| (x + y).sin());
        let cs = pair_sum(atom, atom, &|x, y| (x + y).cos());
        sn.atan2(cs)
    };
    let (a, b) = (&cfg.atom_a, &cfg.atom_b);
    Ok(CharQuantities {
        lamb_a: lamb(a),
        lamb_b: lamb(b),
        gamma_a: decay(a),
        gamma_b: decay(b),
        g_ab: half * pair_sum(a, b, &|x, y| (y - x).abs().sin()),
        gamma_ab: pair_sum(a, b, &|x, y| (y - x).cos()),
        alpha_a: alpha(a),
        alpha_b: alpha(b),
        phasor_a: a.phasor(),
        phasor_b: b.phasor(),
    })
}

/// Equal rates `γ` and equal neighbour spacing `φ`, leftmost phase 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricConfig<T> {
    pub topology: Topology,
    pub phi: T,
    pub gamma: T,
}

impl<T: Real> SymmetricConfig<T> {
    pub fn new(topology: Topology, phi: T, gamma: T) -> Self {
        Self { topology, phi, gamma }
    }

    /// Phases `(a1, a2, b1, b2)` in units of `φ`.
    pub fn slots(topology: Topology) -> [u8; 4] {
        match topology {
            Topology::Separate => [0, 1, 2, 3],
            Topology::Braided => [0, 2, 1, 3],
            Topology::Nested => [0, 3, 1, 2],
        }
    }

    /// Explicit four-point geometry with `Δ_ab = 0`.
    pub fn expand(&self) -> Result<SystemConfig<T>, ModelError> {
        self.expand_with(T::zero())
    }

    pub fn expand_with(&self, delta_ab: T) -> Result<SystemConfig<T>, ModelError> {
        if !(self.phi.is_finite() && self.phi >= T::zero()) {
            return Err(ModelError::BadSpacing(self.phi.to_f64_lossy()));
        }
        let [a1, a2, b1, b2] = Self::slots(self.topology).map(|k| self.phi * T::lit(k as f64));
        let g = self.gamma;
        SystemConfig::new(
            GiantAtom::from_pairs((a1, g), (a2, g)),
            GiantAtom::from_pairs((b1, g), (b2, g)),
            delta_ab,
        )?
        .with_rate_unit(if g > T::zero() { g } else { T::one() })
    }
}

/// Recognises a configuration that is a shifted copy of a symmetric one.
/// Returns the shortcut and the phase offset of the leftmost point.
pub fn detect_symmetric<T: Real>(cfg: &SystemConfig<T>) -> Option<(SymmetricConfig<T>, T)> {
    let topology = classify_topology(cfg).ok()?;
    let offset = cfg.atom_a.left().phase;
    let phi = cfg.atom_b.left().phase - offset;
    let phi = match topology {
        Topology::Separate => cfg.atom_a.right().phase - offset,
        _ => phi,
    };
    let gamma = cfg.atom_a.left().rate;
    let sym = SymmetricConfig::new(topology, phi, gamma);
    let expected = sym.expand().ok()?.shifted(offset);
    let scale = T::one() + phi.abs() + offset.abs();
    let tol = T::tol(1e-12);
    let close = |x: T, y: T, s: T| (x - y).abs() <= tol * s;
    let all_match = [(&cfg.atom_a, &expected.atom_a), (&cfg.atom_b, &expected.atom_b)]
        .iter()
        .all(|(x, y)| {
            x.points.iter().zip(&y.points).all(|(p, q)| {
                close(p.phase, q.phase, scale) && close(p.rate, q.rate, T::one() + gamma.abs())
            })
        });
    if all_match && cfg.delta_ab.abs() <= tol * (T::one() + gamma.abs()) {
        Some((sym, offset))
    } else {
        None
    }
}
