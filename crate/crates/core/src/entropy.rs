//! Entropy bookkeeping on an instantiated `n = d + 1` system.
//!
//! Every variable (stored content, repair symbols, messages, keys) is a set of
//! linear functionals over `[message columns | key columns]`; the entropy of a
//! collection is the rank of its stacked rows, in symbols. The `check_*`
//! functions instantiate each inequality of the MBR converse with these ranks
//! and exact rational coefficients.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::FieldMatrix;
use crate::rational::Rational;
use crate::system::System;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum VarId {
    /// Content stored at node `i`.
    W(usize),
    /// What helper `from` sends to `to`.
    S { from: usize, to: usize },
    /// Message of level `j`; constant for `j <= l`.
    M(usize),
    /// All keys.
    Key,
}

pub type Collection = BTreeSet<VarId>;

/// `T(d, k, l)` with the empty sum read as zero.
pub fn t_sum(d: usize, k: usize, l: usize) -> usize {
    (l + 1..=k).map(|t| d + 1 - t).sum()
}

fn r(x: usize) -> Rational {
    Rational::from(x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub params: BTreeMap<String, usize>,
    pub lhs: Rational,
    pub rhs: Rational,
    pub slack: Rational,
    pub satisfied: bool,
}

impl CheckResult {
    pub fn new(name: &str, params: &[(&str, usize)], lhs: Rational, rhs: Rational) -> Self {
        CheckResult {
            name: name.to_string(),
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            lhs,
            rhs,
            slack: lhs - rhs,
            satisfied: lhs >= rhs,
        }
    }

    pub fn is_tight(&self) -> bool {
        self.slack.is_zero()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("check results serialize")
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(
            f,
            "{} {} [{}] lhs={} rhs={} slack={}",
            if self.satisfied { "ok  " } else { "FAIL" },
            self.name,
            params.join(","),
            self.lhs,
            self.rhs,
            self.slack
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Lemma1,
    Exchange1,
    Coro,
    Exchange2,
    Props,
    Symmetry,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => Suite::All,
            "lemma1" => Suite::Lemma1,
            "exchange1" => Suite::Exchange1,
            "coro" => Suite::Coro,
            "exchange2" => Suite::Exchange2,
            "props" => Suite::Props,
            "symmetry" => Suite::Symmetry,
            other => {
                return Err(Error::BadParameters(format!(
                    "unknown suite {other:?} (expected all, lemma1, exchange1, coro, exchange2, props or symmetry)"
                )))
            }
        })
    }
}

pub struct EntropyLab {
    system: System,
    vars: HashMap<VarId, Vec<Vec<u32>>>,
    cache: Mutex<HashMap<Collection, usize>>,
}

impl EntropyLab {
    pub fn new(system: System) -> Result<Self> {
        let (n, d) = (system.n(), system.d());
        if n != d + 1 {
            return Err(Error::NotSquareSystem { n, d });
        }
        let mut vars = HashMap::new();
        for i in 1..=n {
            vars.insert(VarId::W(i), system.stored_rows(i).into_iter().map(|(_, r)| r).collect());
            for h in (1..=n).filter(|&h| h != i) {
                vars.insert(
                    VarId::S { from: h, to: i },
                    system.repair_rows(h, i).into_iter().map(|(_, r)| r).collect(),
                );
            }
        }
        for j in 1..=d {
            vars.insert(VarId::M(j), system.message_rows(j));
        }
        vars.insert(VarId::Key, system.key_rows());
        Ok(EntropyLab {
            system,
            vars,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn d(&self) -> usize {
        self.system.d()
    }

    fn check_var(&self, v: VarId) -> Result<()> {
        let n = self.n();
        let ok = match v {
            VarId::W(i) => (1..=n).contains(&i),
            VarId::S { from, to } => (1..=n).contains(&from) && (1..=n).contains(&to) && from != to,
            VarId::M(j) => (1..=self.d()).contains(&j),
            VarId::Key => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!("{v:?}")))
        }
    }

    /// `H(c)` in symbols.
    pub fn entropy(&self, c: &Collection) -> Result<usize> {
        for &v in c {
            self.check_var(v)?;
        }
        if let Some(&h) = self.cache.lock().expect("cache lock").get(c) {
            return Ok(h);
        }
        let cols = self.system.columns().total();
        let mut entries = Vec::new();
        let mut rows = 0;
        for v in c {
            for row in &self.vars[v] {
                entries.extend_from_slice(row);
                rows += 1;
            }
        }
        let h = FieldMatrix::from_entries(rows, cols, entries, self.system.modulus())?.rank();
        self.cache.lock().expect("cache lock").insert(c.clone(), h);
        Ok(h)
    }

    /// `H(x | y) = H(x, y) - H(y)`.
    pub fn cond_entropy(&self, x: &Collection, y: &Collection) -> Result<usize> {
        let joint: Collection = x.union(y).copied().collect();
        Ok(self.entropy(&joint)? - self.entropy(y)?)
    }

    fn h(&self, c: &Collection) -> Result<Rational> {
        Ok(r(self.entropy(c)?))
    }

    fn hc(&self, x: &Collection, y: &Collection) -> Result<Rational> {
        Ok(r(self.cond_entropy(x, y)?))
    }

    fn range_err(what: &str) -> Error {
        Error::BadRange(what.to_string())
    }

    fn need(cond: bool, what: &str) -> Result<()> {
        if cond {
            Ok(())
        } else {
            Err(Self::range_err(what))
        }
    }

    // ---- collection builders ----

    /// `W_A`.
    pub fn w(&self, nodes: impl IntoIterator<Item = usize>) -> Result<Collection> {
        let c: Collection = nodes.into_iter().map(VarId::W).collect();
        self.validated(c)
    }

    /// `S_{i -> B}`.
    pub fn s_from(&self, i: usize, targets: impl IntoIterator<Item = usize>) -> Result<Collection> {
        let c: Collection = targets.into_iter().map(|to| VarId::S { from: i, to }).collect();
        self.validated(c)
    }

    /// `S_{B -> j}`.
    pub fn s_to(&self, helpers: impl IntoIterator<Item = usize>, j: usize) -> Result<Collection> {
        let c: Collection = helpers.into_iter().map(|from| VarId::S { from, to: j }).collect();
        self.validated(c)
    }

    /// `S_{-> j}`, everything node `j` can download.
    pub fn s_all_to(&self, j: usize) -> Result<Collection> {
        self.s_to((1..=self.n()).filter(|&h| h != j), j)
    }

    /// `S_{[1:j-1] -> j}`.
    pub fn s_under(&self, j: usize) -> Result<Collection> {
        self.s_to(1..j, j)
    }

    /// `S_{[j+1:n] -> j}`.
    pub fn s_over(&self, j: usize) -> Result<Collection> {
        self.s_to(j + 1..=self.n(), j)
    }

    /// `U^(t,s) = (W_[1:t], S_over_{-> [t+1:s]})`.
    pub fn u(&self, t: usize, s: usize) -> Result<Collection> {
        if t > s || s > self.n() {
            return Err(Error::IndexOutOfRange(format!("U^({t},{s}) with n = {}", self.n())));
        }
        let mut c = self.w(1..=t)?;
        for j in t + 1..=s {
            c.extend(self.s_over(j)?);
        }
        Ok(c)
    }

    /// `M^(m) = M_[1:m]`.
    pub fn m_upto(&self, m: usize) -> Result<Collection> {
        let c: Collection = (1..=m).map(VarId::M).collect();
        self.validated(c)
    }

    fn validated(&self, c: Collection) -> Result<Collection> {
        for &v in &c {
            self.check_var(v)?;
        }
        Ok(c)
    }

    // ---- checks ----

    /// `(S_under_{-> [t+1:s]}, W_[t+1:s])` is a function of `U^(t,s)`.
    pub fn check_lemma1(&self, t: usize, s: usize) -> Result<CheckResult> {
        Self::need((1..=self.n()).contains(&s) && t < s, "lemma 1 needs s in [1:n], t in [0:s-1]")?;
        let u = self.u(t, s)?;
        let mut ext = u.clone();
        for j in t + 1..=s {
            ext.extend(self.s_under(j)?);
            ext.insert(VarId::W(j));
        }
        Ok(CheckResult::new("lemma1", &[("t", t), ("s", s)], self.h(&u)?, self.h(&ext)?))
    }

    /// `H(U^(t1,s)) >= H(U^(t2,s))` for `t1 <= t2 <= s - 1`.
    pub fn check_lemma1_monotone(&self, t1: usize, t2: usize, s: usize) -> Result<CheckResult> {
        Self::need(
            (1..=self.n()).contains(&s) && t1 <= t2 && t2 < s,
            "monotonicity needs 0 <= t1 <= t2 <= s-1",
        )?;
        Ok(CheckResult::new(
            "lemma1_monotone",
            &[("t1", t1), ("t2", t2), ("s", s)],
            self.h(&self.u(t1, s)?)?,
            self.h(&self.u(t2, s)?)?,
        ))
    }

    pub fn check_exchange_i(&self, m: usize, i: usize, i2: usize, j: usize) -> Result<CheckResult> {
        let d = self.d();
        Self::need((1..d).contains(&m), "exchange I needs m in [1:d-1]")?;
        Self::need(i < m, "exchange I needs i in [0:m-1]")?;
        Self::need(i2 <= i, "exchange I needs i' in [0:i]")?;
        Self::need(
            j > i2 && j <= m - i + i2 + 1,
            "exchange I needs j in [i'+1:m-i+i'+1]",
        )?;
        let mm = self.m_upto(m)?;
        let c = r(d + 1 - j) / r(d - m);
        let lhs = c * self.hc(&self.u(i, m)?, &mm)? + self.hc(&self.u(i2, j)?, &mm)?;
        let rhs = c * self.hc(&self.u(i, m + 1)?, &mm)? + self.hc(&self.u(i2, j - 1)?, &mm)?;
        Ok(CheckResult::new(
            "exchange1",
            &[("m", m), ("i", i), ("i_prime", i2), ("j", j)],
            lhs,
            rhs,
        ))
    }

    pub fn check_coro1(&self, j1: usize, j2: usize, i: usize, i2: usize) -> Result<CheckResult> {
        let d = self.d();
        Self::need((1..d).contains(&j1), "corollary 1 needs j1 in [1:d-1]")?;
        Self::need(i <= j1, "corollary 1 needs i in [0:j1]")?;
        Self::need(i2 <= i && i2 + 1 >= i, "corollary 1 needs i' in [max(0,i-1):i]")?;
        Self::need(j2 >= i2 && j2 < j1, "corollary 1 needs j2 in [i':j1-1]")?;
        let mm = self.m_upto(j1)?;
        let c = r(t_sum(d, j1, j2)) / r(d - j1);
        let lhs = c * self.hc(&self.u(i, j1)?, &mm)? + self.hc(&self.u(i2, j1)?, &mm)?;
        let rhs = c * self.hc(&self.u(i, j1 + 1)?, &mm)? + self.hc(&self.u(i2, j2)?, &mm)?;
        Ok(CheckResult::new(
            "coro1",
            &[("j1", j1), ("j2", j2), ("i", i), ("i_prime", i2)],
            lhs,
            rhs,
        ))
    }

    pub fn check_coro2(&self, l: usize, l1: usize, m: usize) -> Result<CheckResult> {
        let d = self.d();
        Self::need(l < d, "corollary 2 needs l in [0:d-1]")?;
        Self::need(l1 <= l, "corollary 2 needs l1 in [0:l]")?;
        Self::need(m > l && m < d, "corollary 2 needs m in [l+1:d-1]")?;
        let mm = self.m_upto(m)?;
        let a = r(t_sum(d, m, l)).recip();
        let b = r(t_sum(d, m + 1, l)).recip();
        let lhs = a * self.hc(&self.u(l1, m)?, &mm)?;
        let rhs = b * self.hc(&self.u(l1, m + 1)?, &mm)? + (a - b) * self.hc(&self.u(l1, l)?, &mm)?;
        Ok(CheckResult::new("coro2", &[("l", l), ("l1", l1), ("m", m)], lhs, rhs))
    }

    /// Conditioned on `M^(l)`, which is constant when `l` is the system's own
    /// eavesdropper count.
    pub fn check_exchange_ii(&self, l: usize, l1: usize) -> Result<CheckResult> {
        let d = self.d();
        Self::need((1..d).contains(&l), "exchange II needs l in [1:d-1]")?;
        Self::need(l1 <= l / 2, "exchange II needs l1 in [0:floor(l/2)]")?;
        let mm = self.m_upto(l)?;
        let s = self.s_from(l1 + 1, 1..=l1)?;
        let c = r(d - l1) / r(d - l);
        let with_s = |mut u: Collection| {
            u.extend(s.iter().copied());
            u
        };
        let lhs = c * self.hc(&self.u(l1, l)?, &mm)? + self.hc(&with_s(self.u(l1, l1 + 1)?), &mm)?;
        let rhs = c * self.hc(&self.u(l1, l + 1)?, &mm)? + self.hc(&with_s(self.u(l1, l1)?), &mm)?;
        Ok(CheckResult::new("exchange2", &[("l", l), ("l1", l1)], lhs, rhs))
    }

    /// Exchange II at `l1 = 0` must reproduce exchange I at `i = i' = 0`,
    /// `j = 1`, `m = l`. Satisfied iff both sides agree exactly.
    pub fn check_exchange_ii_vs_i(&self, l: usize) -> Result<CheckResult> {
        let a = self.check_exchange_ii(l, 0)?;
        let b = self.check_exchange_i(l, 0, 0, 1)?;
        let gap = abs(a.lhs - b.lhs) + abs(a.rhs - b.rhs);
        Ok(CheckResult::new("exchange2_vs_exchange1", &[("l", l)], -gap, Rational::ZERO))
    }

    fn own_l(&self) -> (usize, usize) {
        let p = self.system.params();
        (p.l(), p.l1)
    }

    fn b(&self, j: usize) -> Rational {
        r(self.system.file_size(j))
    }

    /// `sum_{j=l+1}^{m} B_j / T(d,j,l)`, in symbols.
    fn weighted(&self, m: usize) -> Rational {
        let (l, _) = self.own_l();
        (l + 1..=m).map(|j| self.b(j) / r(t_sum(self.d(), j, l))).sum()
    }

    pub fn check_prop1_step(&self, m: usize) -> Result<CheckResult> {
        let d = self.d();
        let (l, l1) = self.own_l();
        Self::need(m > l && m <= d, "proposition 1 needs m in [l+1:d]")?;
        let q = r(d - l);
        let tm = r(t_sum(d, m, l));
        let lhs = self.h(&self.u(l1, l + 1)?)? / q;
        let rhs = self.weighted(m)
            + self.hc(&self.u(l1, m)?, &self.m_upto(m)?)? / tm
            + (q.recip() - tm.recip()) * self.h(&self.u(l1, l)?)?;
        Ok(CheckResult::new("prop1_eg", &[("l", l), ("l1", l1), ("m", m)], lhs, rhs))
    }

    pub fn check_prop1(&self) -> Result<CheckResult> {
        let (l, l1) = self.own_l();
        let q = r(self.d() - l);
        let lhs = self.h(&self.u(l1, l + 1)?)? / q;
        let rhs = self.weighted(self.d()) + self.h(&self.u(l1, l)?)? / q;
        Ok(CheckResult::new("prop1", &[("l", l), ("l1", l1)], lhs, rhs))
    }

    pub fn check_prop2(&self) -> Result<CheckResult> {
        let (l, l1) = self.own_l();
        let c = r(l1) / r(self.d() - l);
        let lhs = self.h(&self.s_from(l1 + 1, 1..=l1)?)? + c * self.h(&self.u(l1, l)?)?;
        let rhs = c * self.h(&self.u(l1, l + 1)?)?;
        Ok(CheckResult::new("prop2", &[("l", l), ("l1", l1)], lhs, rhs))
    }

    pub fn check_prop3_step(&self, m: usize) -> Result<CheckResult> {
        let d = self.d();
        let (l, l1) = self.own_l();
        Self::need(m > l && m < d, "proposition 3 needs m in [l+1:d-1]")?;
        let c = r(d - m) / r(d - l);
        let lhs = self.h(&self.u(l1 + 1, m)?)? + c * self.h(&self.u(l1, l + 1)?)?;
        let rhs = r(d - m) * self.weighted(m)
            + self.h(&self.u(l1 + 1, m + 1)?)?
            + c * self.h(&self.u(l1, l)?)?;
        Ok(CheckResult::new("prop3_jh", &[("l", l), ("l1", l1), ("m", m)], lhs, rhs))
    }

    pub fn check_prop3(&self) -> Result<CheckResult> {
        let d = self.d();
        let (l, l1) = self.own_l();
        let q = r(d - l);
        let tdd = r(t_sum(d, d, l));
        let lhs = self.h(&self.u(l1 + 1, l + 1)?)? + r(t_sum(d, d, l + 1)) / q * self.h(&self.u(l1, l + 1)?)?;
        let rhs = tdd * self.weighted(d) + tdd / q * self.h(&self.u(l1, l)?)?;
        Ok(CheckResult::new("prop3", &[("l", l), ("l1", l1)], lhs, rhs))
    }

    fn alpha_beta(&self) -> (Rational, Rational) {
        (r(self.system.alpha()), r(self.system.beta()))
    }

    /// The chain behind `beta >= sum_j B_j / T(d,j,l)`, in symbols: each
    /// adjacent pair of expressions, then the final inequality.
    pub fn check_b3_chain(&self) -> Result<Vec<CheckResult>> {
        let d = self.d();
        let (l, l1) = self.own_l();
        let q = r(d - l);
        let (_, beta) = self.alpha_beta();
        let h0 = self.h(&self.u(l1, l)?)?;
        let e = [
            beta + h0 / q,
            (self.h(&self.s_over(l + 1)?)? + h0) / q,
            self.h(&self.u(l1, l + 1)?)? / q,
            self.weighted(d) + h0 / q,
        ];
        let mut out: Vec<CheckResult> = ["a", "b", "c"]
            .iter()
            .enumerate()
            .map(|(k, step)| {
                CheckResult::new(&format!("b3_step_{step}"), &[("l", l), ("l1", l1)], e[k], e[k + 1])
            })
            .collect();
        out.push(CheckResult::new("b3", &[("l", l), ("l1", l1)], beta, self.weighted(d)));
        Ok(out)
    }

    /// The chain behind `alpha + T(d,d,l1+1) beta >= (T(d,d,l1) + l1) sum_j
    /// B_j / T(d,j,l)`, in symbols. Needs `l1 <= l2`; the step-by-step chain
    /// is only emitted for `l >= 1`.
    pub fn check_b4_chain(&self) -> Result<Vec<CheckResult>> {
        let d = self.d();
        let (l, l1) = self.own_l();
        let l2 = l - l1;
        if l1 > l2 {
            return Err(Error::SplitOutOfRegime { l1, l2 });
        }
        let (alpha, beta) = self.alpha_beta();
        let sigma = self.weighted(d);
        let t = |k: usize, j: usize| r(t_sum(d, k, j));
        let params = [("l", l), ("l1", l1)];
        let final_check = CheckResult::new(
            "b4",
            &params,
            alpha + t(d, l1 + 1) * beta,
            (t(d, l1) + r(l1)) * sigma,
        );
        if l == 0 {
            return Ok(vec![final_check]);
        }

        let q = r(d - l);
        let s = self.s_from(l1 + 1, 1..=l1)?;
        let join = |mut c: Collection, extra: &Collection| {
            c.extend(extra.iter().copied());
            c
        };
        let h0 = self.h(&self.u(l1, l)?)?;
        let h1 = self.h(&self.u(l1, l + 1)?)?;
        let ha = self.h(&self.u(l1, l1 + 1)?)?;
        let has = self.h(&join(self.u(l1, l1 + 1)?, &s))?;
        let hbs = self.h(&join(self.u(l1, l1)?, &s))?;
        let hs = self.h(&s)?;
        let hw = self.h(&self.w([l1 + 1])?)?;
        let hws = self.h(&join(self.w([l1 + 1])?, &s))?;
        let hcs = self.h(&join(self.u(l1 + 1, l1 + 1)?, &s))?;
        let hc = self.h(&self.u(l1 + 1, l1 + 1)?)?;
        let hd = self.h(&self.u(l1 + 1, l + 1)?)?;

        let (a_, dd, c1, lr) = (t(l, l1 + 1), t(d, l + 1), r(d - l1), r(l1));
        let tb = t(d, l1 + 1) * beta;
        let tl = t(l, l1);
        let steps: [(&str, Rational); 14] = [
            ("start", alpha + tb + (lr + t(d, l1)) / q * h0),
            ("a", alpha + tb + (lr / q + a_ / q + dd / q + c1 / q + Rational::ONE) * h0),
            ("b", a_ / q * h1 + ha + alpha + tb + (lr / q + dd / q + c1 / q) * h0),
            ("b2", c1 / q * h0 + has + alpha + tb + (lr / q + dd / q) * h0 + a_ / q * h1),
            ("c", c1 / q * h1 + hbs + alpha + tb + (lr / q + dd / q) * h0 + a_ / q * h1),
            ("d", alpha + hbs + tb + (lr / q + dd / q) * h0 + tl / q * h1),
            ("e", hw + hbs + tb + (lr / q + dd / q) * h0 + tl / q * h1),
            ("f", hws + hbs + tb + (lr / q + dd / q) * h0 + tl / q * h1),
            ("g", hs + hcs + tb + (lr / q + dd / q) * h0 + tl / q * h1),
            ("h", hs + lr / q * h0 + hc + tb + dd / q * h0 + tl / q * h1),
            ("i", lr / q * h1 + hc + tb + dd / q * h0 + tl / q * h1),
            ("j", hc + t(l + 1, l1 + 1) * beta + dd / q * h0 + dd * beta + (tl + lr) / q * h1),
            ("k", hd + dd / q * h1 + (tl + lr) / q * h1),
            ("l", (t(d, l) + tl + lr) * sigma + (t(d, l) + tl + lr) / q * h0),
        ];
        let mut out: Vec<CheckResult> = steps
            .windows(2)
            .map(|w| CheckResult::new(&format!("b4_step_{}", w[1].0), &params, w[0].1, w[1].1))
            .collect();
        let last = steps[steps.len() - 1].1;
        let m_form = (t(d, l1) + lr) * sigma + (t(d, l1) + lr) / q * h0;
        out.push(CheckResult::new("b4_step_m", &params, last, m_form));
        out.push(CheckResult::new("b4_step_m_reverse", &params, m_form, last));
        out.push(final_check);
        Ok(out)
    }

    /// Representative collections used by the symmetry check.
    pub fn symmetry_family(&self) -> Result<Vec<Collection>> {
        let (n, d) = (self.n(), self.d());
        let mut fam = Vec::new();
        for s in 1..=n {
            for t in 0..=s {
                fam.push(self.u(t, s)?);
            }
        }
        for k in 1..=d {
            fam.push(self.s_to(2..=k + 1, 1)?);
            fam.push(self.s_from(1, 2..=k + 1)?);
            fam.push(self.w(1..=k)?);
            let mut mixed = self.w(1..k)?;
            mixed.extend(self.s_to(k + 1..=n, k)?);
            fam.push(mixed);
        }
        let (l, _) = self.own_l();
        for m in l + 1..=d {
            for s in 1..=n {
                let mut c = self.u(0, s)?;
                c.extend(self.m_upto(m)?);
                fam.push(c);
            }
        }
        Ok(fam)
    }

    /// Entropy of every representative collection is unchanged when node
    /// labels are permuted. `lhs` counts invariant (collection, permutation)
    /// pairs, `rhs` all pairs.
    pub fn check_symmetry(&self, perms: &[Vec<usize>]) -> Result<CheckResult> {
        let n = self.n();
        for p in perms {
            let mut sorted = p.clone();
            sorted.sort_unstable();
            if sorted != (1..=n).collect::<Vec<_>>() {
                return Err(Error::BadParameters(format!("{p:?} is not a permutation of 1..={n}")));
            }
        }
        let fam = self.symmetry_family()?;
        let mut invariant = 0;
        for c in &fam {
            let h = self.entropy(c)?;
            for p in perms {
                if self.entropy(&relabel(c, p))? == h {
                    invariant += 1;
                }
            }
        }
        Ok(CheckResult::new(
            "symmetry",
            &[("permutations", perms.len()), ("collections", fam.len())],
            r(invariant),
            r(fam.len() * perms.len()),
        ))
    }

    pub fn suite_lemma1(&self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        for s in 1..=self.n() {
            for t in 0..s {
                out.push(self.check_lemma1(t, s)?);
                for t2 in t..s {
                    out.push(self.check_lemma1_monotone(t, t2, s)?);
                }
            }
        }
        Ok(out)
    }

    pub fn suite_exchange1(&self) -> Result<Vec<CheckResult>> {
        let d = self.d();
        let mut out = Vec::new();
        for m in 1..d {
            for i in 0..m {
                for i2 in 0..=i {
                    for j in i2 + 1..=m - i + i2 + 1 {
                        out.push(self.check_exchange_i(m, i, i2, j)?);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn suite_coro(&self) -> Result<Vec<CheckResult>> {
        let d = self.d();
        let mut out = Vec::new();
        for j1 in 1..d {
            for i in 0..=j1 {
                for i2 in i.saturating_sub(1)..=i {
                    for j2 in i2..j1 {
                        out.push(self.check_coro1(j1, j2, i, i2)?);
                    }
                }
            }
        }
        for l in 0..d {
            for l1 in 0..=l {
                for m in l + 1..d {
                    out.push(self.check_coro2(l, l1, m)?);
                }
            }
        }
        Ok(out)
    }

    pub fn suite_exchange2(&self) -> Result<Vec<CheckResult>> {
        let mut out = Vec::new();
        for l in 1..self.d() {
            for l1 in 0..=l / 2 {
                out.push(self.check_exchange_ii(l, l1)?);
            }
            out.push(self.check_exchange_ii_vs_i(l)?);
        }
        Ok(out)
    }

    /// Propositions 1 to 3 and both bound chains for the system's own `(l, l1)`.
    pub fn suite_props(&self) -> Result<Vec<CheckResult>> {
        let d = self.d();
        let (l, l1) = self.own_l();
        let mut out = Vec::new();
        for m in l + 1..=d {
            out.push(self.check_prop1_step(m)?);
        }
        out.push(self.check_prop1()?);
        out.push(self.check_prop2()?);
        for m in l + 1..d {
            out.push(self.check_prop3_step(m)?);
        }
        out.push(self.check_prop3()?);
        out.extend(self.check_b3_chain()?);
        if l1 <= l - l1 {
            out.extend(self.check_b4_chain()?);
        }
        Ok(out)
    }

    pub fn suite_symmetry(&self) -> Result<Vec<CheckResult>> {
        let perms = if self.n() <= 5 {
            all_permutations(self.n())
        } else {
            sample_permutations(self.n(), 120, 0)
        };
        Ok(vec![self.check_symmetry(&perms)?])
    }

    pub fn run_suite(&self, suite: Suite) -> Result<Vec<CheckResult>> {
        match suite {
            Suite::Lemma1 => self.suite_lemma1(),
            Suite::Exchange1 => self.suite_exchange1(),
            Suite::Coro => self.suite_coro(),
            Suite::Exchange2 => self.suite_exchange2(),
            Suite::Props => self.suite_props(),
            Suite::Symmetry => self.suite_symmetry(),
            Suite::All => {
                let mut out = Vec::new();
                for s in [
                    Suite::Lemma1,
                    Suite::Exchange1,
                    Suite::Coro,
                    Suite::Exchange2,
                    Suite::Props,
                    Suite::Symmetry,
                ] {
                    out.extend(self.run_suite(s)?);
                }
                Ok(out)
            }
        }
    }
}

fn abs(x: Rational) -> Rational {
    if x.is_negative() {
        -x
    } else {
        x
    }
}

/// Applies `perm` (node `i` becomes `perm[i-1]`) to every index in `c`.
pub fn relabel(c: &Collection, perm: &[usize]) -> Collection {
    let p = |i: usize| perm[i - 1];
    c.iter()
        .map(|&v| match v {
            VarId::W(i) => VarId::W(p(i)),
            VarId::S { from, to } => VarId::S {
                from: p(from),
                to: p(to),
            },
            other => other,
        })
        .collect()
}

/// All `n!` permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for k in 0..rest.len() {
            let x = rest.remove(k);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(k, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (1..=n).collect(), &mut Vec::new(), &mut out);
    out
}

/// The identity plus `count - 1` seeded uniform shuffles.
pub fn sample_permutations(n: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id: Vec<usize> = (1..=n).collect();
    let mut out = vec![id.clone()];
    while out.len() < count {
        let mut p = id.clone();
        p.shuffle(&mut rng);
        out.push(p);
    }
    out
}
