use super::operator::Operator;
use super::space::HilbertSpace;
use crate::error::{Error, Result};
use crate::tol;

/// One constant-Hamiltonian interval of a pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub hamiltonian: Operator,
    /// Duration in ns.
    pub duration: f64,
}

/// Piecewise-constant control: segments are applied in order, first
/// segment first.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    space: HilbertSpace,
    segments: Vec<Segment>,
    total_duration: f64,
}

impl PulseSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::InvalidSchedule("no segments".into()))?;
        let space = first.hamiltonian.space().clone();
        for (k, seg) in segments.iter().enumerate() {
            if !(seg.duration > 0.0 && seg.duration.is_finite()) {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k} has duration {}",
                    seg.duration
                )));
            }
            if seg.hamiltonian.space() != &space {
                return Err(Error::InvalidSchedule(format!(
                    "segment {k} lives in a different space"
                )));
            }
            seg.hamiltonian.require_hermitian()?;
        }
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Ok(Self {
            space,
            segments,
            total_duration,
        })
    }

    pub fn from_pairs(pairs: Vec<(Operator, f64)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(hamiltonian, duration)| Segment {
                    hamiltonian,
                    duration,
                })
                .collect(),
        )
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// τ in ns.
    pub fn total_duration(&self) -> f64 {
        self.total_duration
    }

    /// Every Hamiltonian multiplied by `factor`; used for global control
    /// errors `H → (1+δ)H`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space.clone(),
            segments: self
                .segments
                .iter()
                .map(|s| Segment {
                    hamiltonian: s.hamiltonian.scaled_real(factor),
                    duration: s.duration,
                })
                .collect(),
            total_duration: self.total_duration,
        }
    }

    /// Same Hamiltonians with every duration multiplied by `factor`.
    pub fn stretched(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.segments
                .iter()
                .map(|s| Segment {
                    hamiltonian: s.hamiltonian.clone(),
                    duration: s.duration * factor,
                })
                .collect(),
        )
    }

    /// Each segment cut into `parts` equal pieces.
    pub fn refined(&self, parts: usize) -> Self {
        let parts = parts.max(1);
        let segments = self
            .segments
            .iter()
            .flat_map(|s| {
                std::iter::repeat(Segment {
                    hamiltonian: s.hamiltonian.clone(),
                    duration: s.duration / parts as f64,
                })
                .take(parts)
            })
            .collect();
        Self {
            space: self.space.clone(),
            segments,
            total_duration: self.total_duration,
        }
    }

    /// Index of the segment active at time `t` (intervals closed on the
    /// right, the first one also on the left) and the time already spent in it.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let mut start = 0.0;
        for (k, seg) in self.segments.iter().enumerate() {
            let end = start + seg.duration;
            if t <= end + tol::SCHEDULE_DURATION || k + 1 == self.segments.len() {
                return (k, (t - start).clamp(0.0, seg.duration));
            }
            start = end;
        }
        unreachable!("schedule is never empty")
    }

    /// Sub-schedule covering `[0, t]`; `None` for `t = 0`.
    pub fn truncated(&self, t: f64) -> Option<Self> {
        if t <= 0.0 {
            return None;
        }
        let (k, into) = self.locate(t);
        let mut segments: Vec<Segment> = self.segments[..k].to_vec();
        if into > 0.0 {
            segments.push(Segment {
                hamiltonian: self.segments[k].hamiltonian.clone(),
                duration: into,
            });
        }
        if segments.is_empty() {
            return None;
        }
        let total_duration = segments.iter().map(|s| s.duration).sum();
        Some(Self {
            space: self.space.clone(),
            segments,
            total_duration,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdyn::local;

    #[test]
    fn rejects_bad_segments() {
        assert!(PulseSchedule::new(vec![]).is_err());
        assert!(PulseSchedule::from_pairs(vec![(local::pauli_x(), 0.0)]).is_err());
        assert!(PulseSchedule::from_pairs(vec![(local::sigma_plus(), 1.0)]).is_err());
        assert!(PulseSchedule::from_pairs(vec![
            (local::pauli_x(), 1.0),
            (local::identity(3), 1.0)
        ])
        .is_err());
    }

    #[test]
    fn durations_add_up() {
        let s = PulseSchedule::from_pairs(vec![
            (local::pauli_x(), 0.25),
            (local::pauli_y(), 0.5),
            (local::pauli_z(), 1.0),
        ])
        .unwrap();
        assert!((s.total_duration() - 1.75).abs() < 1e-12);
        let r = s.refined(7);
        assert_eq!(r.len(), 21);
        let sum: f64 = r.segments().iter().map(|s| s.duration).sum();
        assert!((sum - s.total_duration()).abs() < tol::SCHEDULE_DURATION);
        assert_eq!(s.locate(0.25), (0, 0.25));
        assert_eq!(s.locate(0.3).0, 1);
        let t = s.truncated(0.5).unwrap();
        assert_eq!(t.len(), 2);
        assert!((t.total_duration() - 0.5).abs() < 1e-15);
    }
}
