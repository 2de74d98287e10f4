use crate::qcore::SpectralSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapReport {
    pub is_nondegenerate: bool,
    /// Adjacent pairs in the sorted gap list closer than the tolerance.
    /// Gaps that are themselves within tolerance of zero (degenerate
    /// levels) count as collisions too.
    pub gap_collision_count: usize,
    pub n_gaps: usize,
}

/// Scans all positive gaps E_a − E_b (a > b) for coincidences within `tol`.
pub fn nondegenerate_gaps_check(sys: &SpectralSystem, tol: f64) -> GapReport {
    gap_scan(sys.energies(), tol)
}

pub(crate) fn gap_scan(energies: &[f64], tol: f64) -> GapReport {
    let d = energies.len();
    let mut gaps = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for a in 0..d {
        for b in 0..a {
            gaps.push((energies[a] - energies[b]).abs());
        }
    }
    gaps.sort_by(f64::total_cmp);
    let zero = gaps.iter().take_while(|&&g| g <= tol).count();
    let adjacent = gaps.windows(2).filter(|w| w[1] - w[0] <= tol).count();
    let gap_collision_count = zero + adjacent;
    GapReport {
        is_nondegenerate: gap_collision_count == 0,
        gap_collision_count,
        n_gaps: gaps.len(),
    }
}
