//! Outer bounds on the normalized storage/repair-bandwidth tradeoff, the MBR
//! operating point, and exports of the bounded region.
//!
//! Everything here is exact rational arithmetic. A half-plane is kept as
//! `alpha_coef * alpha + beta_coef * beta >= rhs`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `T(d, k, l) = sum_{t=l+1}^{k} (d + 1 - t)`: the per-stripe message
/// capacity of a secure `(n, k, d, l)` MBR code with unit repair bandwidth.
pub fn level_capacity(d: usize, k: usize, l: usize) -> Result<usize> {
    if l > k || k > d {
        return Err(Error::BadRange(format!(
            "capacity needs 0 <= l <= k <= d, got d={d} k={k} l={l}"
        )));
    }
    Ok((l + 1..=k).map(|t| d + 1 - t).sum())
}

/// Normalized file rates `B̄_j` for the levels `j = l+1..=d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedRates {
    d: usize,
    l1: usize,
    l2: usize,
    rates: Vec<Rational>,
}

impl NormalizedRates {
    /// `rates[i]` is the rate of level `l1 + l2 + 1 + i`; the rates must be
    /// nonnegative and sum to one.
    pub fn new(d: usize, l1: usize, l2: usize, rates: Vec<Rational>) -> Result<Self> {
        let r = Self::unnormalized(d, l1, l2, rates)?;
        let total: Rational = r.rates.iter().copied().sum();
        if total != Rational::ONE {
            return Err(Error::InvalidRates(format!("rates sum to {total}, not 1")));
        }
        Ok(r)
    }

    /// The all-zero rate vector. It violates the unit-sum normalization and
    /// exists only for degenerate queries.
    pub fn zero(d: usize, l1: usize, l2: usize) -> Result<Self> {
        let l = l1 + l2;
        if l >= d {
            return Err(Error::InvalidRates(format!("need l1 + l2 < d, got l={l} d={d}")));
        }
        Self::unnormalized(d, l1, l2, vec![Rational::ZERO; d - l])
    }

    /// All mass on level `j`.
    pub fn single_level(d: usize, l1: usize, l2: usize, j: usize) -> Result<Self> {
        let l = l1 + l2;
        if j <= l || j > d {
            return Err(Error::InvalidRates(format!("level {j} outside {}..={d}", l + 1)));
        }
        let mut rates = vec![Rational::ZERO; d - l];
        rates[j - l - 1] = Rational::ONE;
        Self::new(d, l1, l2, rates)
    }

    fn unnormalized(d: usize, l1: usize, l2: usize, rates: Vec<Rational>) -> Result<Self> {
        let l = l1 + l2;
        if l >= d {
            return Err(Error::InvalidRates(format!("need l1 + l2 < d, got l={l} d={d}")));
        }
        if rates.len() != d - l {
            return Err(Error::InvalidRates(format!(
                "expected {} rates for levels {}..={d}, got {}",
                d - l,
                l + 1,
                rates.len()
            )));
        }
        if let Some(r) = rates.iter().find(|r| r.is_negative()) {
            return Err(Error::InvalidRates(format!("negative rate {r}")));
        }
        Ok(NormalizedRates { d, l1, l2, rates })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn l1(&self) -> usize {
        self.l1
    }

    pub fn l2(&self) -> usize {
        self.l2
    }

    pub fn l(&self) -> usize {
        self.l1 + self.l2
    }

    /// `(level, rate)` pairs in ascending level order.
    pub fn levels(&self) -> impl Iterator<Item = (usize, Rational)> + '_ {
        let l = self.l();
        self.rates.iter().enumerate().map(move |(i, &r)| (l + 1 + i, r))
    }

    pub fn rate(&self, level: usize) -> Option<Rational> {
        self.levels().find(|&(j, _)| j == level).map(|(_, r)| r)
    }

    /// `sum_j B̄_j / T(d, j, l)`.
    pub fn weighted_sum(&self) -> Rational {
        let l = self.l();
        self.levels()
            .map(|(j, r)| {
                let t = level_capacity(self.d, j, l).expect("levels lie in range");
                r / Rational::from(t)
            })
            .sum()
    }
}

/// A normalized `(ᾱ, β̄)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub alpha: Rational,
    pub beta: Rational,
}

/// `alpha_coef * ᾱ + beta_coef * β̄ >= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearBound {
    pub alpha_coef: Rational,
    pub beta_coef: Rational,
    pub rhs: Rational,
}

impl LinearBound {
    pub fn lhs_at(&self, p: TradeoffPoint) -> Rational {
        self.alpha_coef * p.alpha + self.beta_coef * p.beta
    }

    pub fn is_satisfied(&self, p: TradeoffPoint) -> bool {
        self.lhs_at(p) >= self.rhs
    }

    pub fn is_tight(&self, p: TradeoffPoint) -> bool {
        self.lhs_at(p) == self.rhs
    }

    /// Smallest `ᾱ` allowed at the given `β̄`, before clipping at zero.
    pub fn alpha_floor(&self, beta: Rational) -> Rational {
        (self.rhs - self.beta_coef * beta) / self.alpha_coef
    }
}

impl fmt::Display for LinearBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: Rational, v: &str| {
            if c == Rational::ONE {
                v.to_string()
            } else {
                format!("{c}*{v}")
            }
        };
        write!(
            f,
            "{} + {} >= {}",
            term(self.alpha_coef, "alpha"),
            term(self.beta_coef, "beta"),
            self.rhs
        )
    }
}

/// The MBR point `(d·Σ, Σ)` with `Σ = sum_j B̄_j / T(d, j, l)`.
pub fn mbr_point(rates: &NormalizedRates) -> TradeoffPoint {
    let s = rates.weighted_sum();
    TradeoffPoint {
        alpha: Rational::from(rates.d) * s,
        beta: s,
    }
}

/// Lower bound on `β̄`; holds for every split of `l`.
pub fn bound_beta(rates: &NormalizedRates) -> Rational {
    rates.weighted_sum()
}

/// `ᾱ + T(d,d,l1+1) β̄ >= (T(d,d,l1) + l1) Σ`, asserted only for `l1 <= l2`.
pub fn bound_general(rates: &NormalizedRates) -> Result<LinearBound> {
    let (d, l1, l2) = (rates.d, rates.l1, rates.l2);
    if l1 > l2 {
        return Err(Error::SplitOutOfRegime { l1, l2 });
    }
    Ok(LinearBound {
        alpha_coef: Rational::ONE,
        beta_coef: Rational::from(level_capacity(d, d, l1 + 1)?),
        rhs: Rational::from(level_capacity(d, d, l1)? + l1) * rates.weighted_sum(),
    })
}

/// The earlier all-type-II bound `ᾱ + (d(d-l) - l) β̄ >= (d-l)(d+1) Σ`.
pub fn bound_prior(rates: &NormalizedRates) -> LinearBound {
    let (d, l) = (rates.d, rates.l());
    LinearBound {
        alpha_coef: Rational::ONE,
        beta_coef: Rational::from(d * (d - l) - l),
        rhs: Rational::from((d - l) * (d + 1)) * rates.weighted_sum(),
    }
}

/// The general bound written out for `l1 = 0`:
/// `ᾱ + d(d-1)/2 β̄ >= d(d+1)/2 Σ`.
pub fn bound_l1_zero(rates: &NormalizedRates) -> LinearBound {
    let d = rates.d;
    LinearBound {
        alpha_coef: Rational::ONE,
        beta_coef: Rational::from(d * (d - 1) / 2),
        rhs: Rational::from(d * (d + 1) / 2) * rates.weighted_sum(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionReport {
    pub intersection: TradeoffPoint,
    pub mbr: TradeoffPoint,
    pub matches_mbr: bool,
    pub prior_tight: bool,
}

impl IntersectionReport {
    pub fn holds(&self) -> bool {
        self.matches_mbr && self.prior_tight
    }
}

/// Solves the two bounding lines as equalities and compares the corner with
/// the MBR point.
pub fn intersection_check(rates: &NormalizedRates) -> Result<IntersectionReport> {
    let general = bound_general(rates)?;
    let beta = bound_beta(rates);
    let alpha = general.alpha_floor(beta);
    let intersection = TradeoffPoint { alpha, beta };
    let mbr = mbr_point(rates);
    Ok(IntersectionReport {
        intersection,
        mbr,
        matches_mbr: intersection == mbr,
        prior_tight: bound_prior(rates).is_tight(intersection),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    /// The `l1 = 0` general bound cuts off strictly more.
    GeneralStronger,
    /// The earlier all-type-II bound cuts off strictly more.
    PriorStronger,
    /// The two lines coincide.
    Tie,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominanceReport {
    pub d: usize,
    pub l: usize,
    pub verdict: Dominance,
    pub witness_beta: Rational,
    pub general_floor: Rational,
    pub prior_floor: Rational,
}

impl DominanceReport {
    /// True when the general bound is at least as strong as the prior one.
    pub fn general_at_least_as_strong(&self) -> bool {
        self.verdict != Dominance::PriorStronger
    }
}

/// Compares the `l1 = 0` general bound with the prior bound above the
/// `β̄` floor. Both lines pass through the MBR corner, so the comparison at
/// any single `β̄` beyond it decides the whole ray.
pub fn dominance(d: usize, l: usize) -> Result<DominanceReport> {
    if l >= d {
        return Err(Error::BadRange(format!("dominance needs l < d, got l={l} d={d}")));
    }
    let rates = NormalizedRates::single_level(d, 0, l, d)?;
    let general = bound_l1_zero(&rates);
    let prior = bound_prior(&rates);
    let witness_beta = bound_beta(&rates) * Rational::int(2);
    let general_floor = general.alpha_floor(witness_beta);
    let prior_floor = prior.alpha_floor(witness_beta);
    let verdict = match general_floor.cmp(&prior_floor) {
        std::cmp::Ordering::Greater => Dominance::GeneralStronger,
        std::cmp::Ordering::Less => Dominance::PriorStronger,
        std::cmp::Ordering::Equal => Dominance::Tie,
    };
    Ok(DominanceReport {
        d,
        l,
        verdict,
        witness_beta,
        general_floor,
        prior_floor,
    })
}

/// One row of the region table. Floors are `None` where the bound is not
/// asserted for this split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionRow {
    pub beta_bar: Rational,
    pub above_beta_floor: bool,
    pub alpha_floor_b4: Option<Rational>,
    pub alpha_floor_type2_2: Option<Rational>,
    pub alpha_floor_b: Option<Rational>,
    pub envelope: Rational,
}

pub const REGION_CSV_HEADER: &str =
    "beta_bar,alpha_floor_B3_marker,alpha_floor_B4,alpha_floor_type2_2,alpha_floor_B,envelope";

impl RegionRow {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<Rational>| v.map(|r| r.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{}",
            self.beta_bar,
            if self.above_beta_floor { "ok" } else { "below" },
            opt(self.alpha_floor_b4),
            opt(self.alpha_floor_type2_2),
            opt(self.alpha_floor_b),
            self.envelope
        )
    }
}

/// Evaluates every applicable bound on a `β̄` grid. The general bound applies
/// when `l1 <= l2`; the prior and `l1 = 0` bounds only when `l1 = 0`. The
/// envelope is the largest applicable floor, clipped at zero.
pub fn region_export(rates: &NormalizedRates, grid: &[Rational]) -> Vec<RegionRow> {
    let floor = bound_beta(rates);
    let general = bound_general(rates).ok();
    let (prior, l1_zero) = if rates.l1 == 0 {
        (Some(bound_prior(rates)), Some(bound_l1_zero(rates)))
    } else {
        (None, None)
    };
    grid.iter()
        .map(|&beta| {
            let b4 = general.map(|b| b.alpha_floor(beta));
            let t22 = prior.map(|b| b.alpha_floor(beta));
            let b = l1_zero.map(|b| b.alpha_floor(beta));
            let envelope = [b4, t22, b]
                .into_iter()
                .flatten()
                .fold(Rational::ZERO, Rational::max);
            RegionRow {
                beta_bar: beta,
                above_beta_floor: beta >= floor,
                alpha_floor_b4: b4,
                alpha_floor_type2_2: t22,
                alpha_floor_b: b,
                envelope,
            }
        })
        .collect()
}

pub fn region_csv(rows: &[RegionRow]) -> String {
    let mut out = String::from(REGION_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}

/// Smallest integer file sizes (in symbols) that realize `rates` and split
/// into whole stripes at every level.
pub fn file_sizes_for_rates(rates: &NormalizedRates) -> Result<BTreeMap<usize, usize>> {
    let l = rates.l();
    // stripes_j = lambda * B̄_j / T_j must be integral with gcd 1.
    let per_stripe: Vec<(usize, usize, Rational)> = rates
        .levels()
        .map(|(j, r)| {
            let t = level_capacity(rates.d, j, l)?;
            Ok((j, t, r / Rational::from(t)))
        })
        .collect::<Result<_>>()?;
    let lcm = per_stripe
        .iter()
        .filter(|(_, _, q)| !q.is_zero())
        .fold(1i128, |acc, (_, _, q)| acc.lcm(&q.denom()));
    let g = per_stripe
        .iter()
        .filter(|(_, _, q)| !q.is_zero())
        .fold(0i128, |acc, (_, _, q)| acc.gcd(&(q.numer() * (lcm / q.denom()))));
    if g == 0 {
        return Err(Error::EmptySystem);
    }
    Ok(per_stripe
        .into_iter()
        .map(|(j, t, q)| {
            let stripes = q.numer() * (lcm / q.denom()) / g;
            (j, stripes as usize * t)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn reference() -> NormalizedRates {
        NormalizedRates::new(3, 0, 0, vec![r(0, 1), r(1, 3), r(2, 3)]).unwrap()
    }

    /// Direct summation, independent of `level_capacity`.
    fn capacity_oracle(d: usize, k: usize, l: usize) -> usize {
        let mut total = 0;
        let mut t = l + 1;
        while t <= k {
            total += d + 1 - t;
            t += 1;
        }
        total
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(level_capacity(3, 3, 0).unwrap(), 6);
        assert_eq!(level_capacity(4, 3, 2).unwrap(), 2);
        for d in 1..8 {
            for k in 0..=d {
                assert_eq!(level_capacity(d, k, k).unwrap(), 0);
                for l in 0..=k {
                    assert_eq!(level_capacity(d, k, l).unwrap(), capacity_oracle(d, k, l));
                }
            }
        }
        assert!(matches!(level_capacity(3, 4, 0), Err(Error::BadRange(_))));
        assert!(matches!(level_capacity(3, 1, 2), Err(Error::BadRange(_))));
    }

    #[test]
    fn rates_validation() {
        assert!(NormalizedRates::new(3, 0, 0, vec![r(1, 2), r(1, 2)]).is_err());
        assert!(NormalizedRates::new(3, 0, 0, vec![r(1, 2), r(1, 3), r(1, 3)]).is_err());
        assert!(NormalizedRates::new(3, 0, 0, vec![r(-1, 3), r(2, 3), r(2, 3)]).is_err());
        assert!(NormalizedRates::new(3, 1, 2, vec![]).is_err());
    }

    #[test]
    fn mbr_point_examples() {
        let p = mbr_point(&reference());
        assert_eq!((p.alpha, p.beta), (r(8, 15), r(8, 45)));

        for d in 2..7 {
            for l in 0..d {
                for j in l + 1..=d {
                    let rates = NormalizedRates::single_level(d, 0, l, j).unwrap();
                    let t = capacity_oracle(d, j, l) as i128;
                    let p = mbr_point(&rates);
                    assert_eq!(p, TradeoffPoint { alpha: r(d as i128, t), beta: r(1, t) });
                }
            }
        }

        let rates = NormalizedRates::new(4, 1, 1, vec![r(2, 5), r(3, 5)]).unwrap();
        assert_eq!(mbr_point(&rates), TradeoffPoint { alpha: r(8, 5), beta: r(2, 5) });
    }

    #[test]
    fn beta_bound_examples() {
        assert_eq!(bound_beta(&reference()), r(8, 45));
        assert_eq!(bound_beta(&NormalizedRates::zero(3, 0, 0).unwrap()), Rational::ZERO);
        let rates = NormalizedRates::new(4, 1, 1, vec![r(2, 5), r(3, 5)]).unwrap();
        assert_eq!(bound_beta(&rates), r(2, 5));
    }

    #[test]
    fn general_bound_examples() {
        let b = bound_general(&reference()).unwrap();
        assert_eq!(b.to_string(), "alpha + 3*beta >= 16/15");

        // T(4,4,2) = 3, T(4,4,1) + 1 = 7, Σ = 2/5.
        let rates = NormalizedRates::new(4, 1, 1, vec![r(2, 5), r(3, 5)]).unwrap();
        let b = bound_general(&rates).unwrap();
        assert_eq!((b.beta_coef, b.rhs), (Rational::int(3), r(14, 5)));

        let rates = NormalizedRates::new(4, 2, 1, vec![Rational::ONE]).unwrap();
        assert_eq!(bound_general(&rates), Err(Error::SplitOutOfRegime { l1: 2, l2: 1 }));
    }

    #[test]
    fn prior_bound_examples() {
        assert_eq!(bound_prior(&reference()).to_string(), "alpha + 9*beta >= 32/15");
        let rates = NormalizedRates::new(4, 0, 2, vec![r(2, 5), r(3, 5)]).unwrap();
        let b = bound_prior(&rates);
        assert_eq!((b.beta_coef, b.rhs), (Rational::int(6), Rational::int(4)));
    }

    #[test]
    fn l1_zero_bound_examples() {
        assert_eq!(bound_l1_zero(&reference()), bound_general(&reference()).unwrap());
        let b = bound_l1_zero(&NormalizedRates::single_level(2, 0, 0, 2).unwrap());
        assert_eq!((b.alpha_coef, b.beta_coef), (Rational::ONE, Rational::int(1)));
        assert_eq!(b.rhs, Rational::int(3) / Rational::int(3));
    }

    #[test]
    fn intersection_examples() {
        let rep = intersection_check(&reference()).unwrap();
        assert_eq!(rep.intersection, TradeoffPoint { alpha: r(8, 15), beta: r(8, 45) });
        assert!(rep.holds());

        for d in 2..8 {
            for l in 0..d {
                for l1 in 0..=l / 2 {
                    for j in l + 1..=d {
                        let rates = NormalizedRates::single_level(d, l1, l - l1, j).unwrap();
                        assert!(intersection_check(&rates).unwrap().matches_mbr);
                    }
                }
            }
        }

        let rep = intersection_check(&NormalizedRates::zero(3, 0, 0).unwrap()).unwrap();
        assert_eq!(rep.intersection, TradeoffPoint { alpha: Rational::ZERO, beta: Rational::ZERO });
        assert!(matches!(
            intersection_check(&NormalizedRates::single_level(4, 2, 1, 4).unwrap()),
            Err(Error::SplitOutOfRegime { .. })
        ));
    }

    #[test]
    fn dominance_examples() {
        assert_eq!(dominance(3, 0).unwrap().verdict, Dominance::GeneralStronger);
        assert_eq!(dominance(3, 2).unwrap().verdict, Dominance::PriorStronger);
        assert_eq!(dominance(4, 2).unwrap().verdict, Dominance::Tie);
        assert!(dominance(3, 3).is_err());
    }

    #[test]
    fn region_examples() {
        let rows = region_export(&reference(), &[r(8, 45), r(16, 45), Rational::int(100), r(1, 45)]);
        assert_eq!(rows[0].envelope, r(8, 15));
        assert!(rows[0].above_beta_floor);
        assert_eq!(rows[1].alpha_floor_b, Some(Rational::ZERO));
        assert_eq!(rows[1].envelope, Rational::ZERO);
        assert_eq!(rows[2].envelope, Rational::ZERO);
        assert!(!rows[3].above_beta_floor);
        let csv = region_csv(&rows[..1]);
        assert_eq!(
            csv,
            format!("{REGION_CSV_HEADER}\n8/45,ok,8/15,8/15,8/15,8/15\n")
        );
    }

    #[test]
    fn region_omits_bounds_out_of_regime() {
        let rates = NormalizedRates::single_level(4, 2, 1, 4).unwrap();
        let row = &region_export(&rates, &[Rational::ONE])[0];
        assert_eq!(row.alpha_floor_b4, None);
        assert_eq!(row.alpha_floor_type2_2, None);
    }

    #[test]
    fn sizes_for_rates() {
        let sizes = file_sizes_for_rates(&reference()).unwrap();
        assert_eq!(sizes, BTreeMap::from([(1, 0), (2, 15), (3, 30)]));
        let rates = NormalizedRates::new(4, 1, 1, vec![r(2, 5), r(3, 5)]).unwrap();
        assert_eq!(file_sizes_for_rates(&rates).unwrap(), BTreeMap::from([(3, 2), (4, 3)]));
        assert_eq!(
            file_sizes_for_rates(&NormalizedRates::zero(3, 0, 0).unwrap()),
            Err(Error::EmptySystem)
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_rates() -> impl Strategy<Value = NormalizedRates> {
            (2usize..9)
                .prop_flat_map(|d| (Just(d), 0..d))
                .prop_flat_map(|(d, l)| (Just(d), Just(l), 0..=l / 2))
                .prop_flat_map(|(d, l, l1)| {
                    proptest::collection::vec(0i128..20, d - l)
                        .prop_filter("nonzero", |w| w.iter().any(|&x| x > 0))
                        .prop_map(move |w| {
                            let total: i128 = w.iter().sum();
                            let rates = w.iter().map(|&x| Rational::new(x, total)).collect();
                            NormalizedRates::new(d, l1, l - l1, rates).unwrap()
                        })
                })
        }

        proptest! {
            #[test]
            fn mbr_point_is_tight_for_both_bounds(rates in arb_rates()) {
                let p = mbr_point(&rates);
                prop_assert_eq!(p.beta, bound_beta(&rates));
                prop_assert!(bound_general(&rates).unwrap().is_tight(p));
                prop_assert!(bound_prior(&rates).is_tight(p));
            }

            #[test]
            fn general_at_zero_matches_closed_form(rates in arb_rates()) {
                let z = NormalizedRates::new(rates.d(), 0, rates.l(), rates.rates.clone()).unwrap();
                prop_assert_eq!(bound_general(&z).unwrap(), bound_l1_zero(&z));
            }

            #[test]
            fn sizes_realize_rates(rates in arb_rates()) {
                let sizes = file_sizes_for_rates(&rates).unwrap();
                let total: usize = sizes.values().sum();
                for (j, rate) in rates.levels() {
                    let b = sizes[&j];
                    prop_assert_eq!(Rational::from(b) / Rational::from(total), rate);
                    prop_assert_eq!(b % level_capacity(rates.d(), j, rates.l()).unwrap(), 0);
                }
            }
        }
    }
}
