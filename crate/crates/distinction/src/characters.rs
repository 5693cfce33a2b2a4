//! Smooth F̄_ℓ-characters of the truncated groups F^×, E^× and K^×.
//!
//! A character is stored by its value at the uniformizer and its values on
//! the unit-group basis. Pullbacks along field maps (restriction, norm,
//! Galois twist) evaluate the source character on the images of the target
//! generators, so every operation reduces to discrete logs in one field.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localfield::{ExtType, FieldSpec, FieldSystem, FieldTag, KExt, LocalField};
use crate::scalars::{lcm, mod_inv, mult_order, prime_to_part, Ff, Fq, RootOfUnity};
use crate::weilrep::KWeil;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SmoothCharacter {
    pub domain: FieldTag,
    pub unif_value: RootOfUnity,
    pub unit_values: Vec<RootOfUnity>,
}

impl SmoothCharacter {
    pub fn trivial(field: &LocalField) -> Self {
        SmoothCharacter {
            domain: field.tag,
            unif_value: RootOfUnity::ONE,
            unit_values: vec![RootOfUnity::ONE; field.units.gens.len()],
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.domain, o.domain, "characters of different groups");
        SmoothCharacter {
            domain: self.domain,
            unif_value: self.unif_value.mul(o.unif_value),
            unit_values: self.unit_values.iter().zip(&o.unit_values).map(|(a, b)| a.mul(*b)).collect(),
        }
    }

    pub fn inv(&self) -> Self {
        self.pow(-1)
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn pow(&self, k: i64) -> Self {
        SmoothCharacter {
            domain: self.domain,
            unif_value: self.unif_value.pow(k),
            unit_values: self.unit_values.iter().map(|a| a.pow(k)).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.unif_value.is_one() && self.unit_values.iter().all(|v| v.is_one())
    }

    pub fn order(&self) -> u64 {
        self.unit_values.iter().fold(self.unif_value.den(), |m, v| lcm(m, v.den()))
    }

    pub fn is_quadratic(&self) -> bool {
        self.pow(2).is_trivial()
    }

    pub fn is_unramified(&self) -> bool {
        self.unit_values.iter().all(|v| v.is_one())
    }

    /// Every root of unity the character takes on generators.
    pub fn values(&self) -> impl Iterator<Item = RootOfUnity> + '_ {
        std::iter::once(self.unif_value).chain(self.unit_values.iter().copied())
    }
}

/// Which square root of ν is called ν^{1/2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NuHalf {
    #[default]
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_unif_order: u64,
    pub max_conductor: u32,
}

impl Bounds {
    /// lcm(8, 2·ord_ℓ(q_E)) and conductor up to the depth.
    pub fn default_for(spec: &FieldSpec) -> Bounds {
        let ord = mult_order(spec.q_e() % spec.ell, spec.ell);
        Bounds { max_unif_order: lcm(8, 2 * ord), max_conductor: spec.depth }
    }
}

/// Everything a computation needs about one configuration.
pub struct Setting {
    pub sys: FieldSystem,
    pub ell: u64,
    pub nu_half: NuHalf,
    pub bounds: Bounds,
    /// ω_{E/F}.
    pub omega: SmoothCharacter,
    /// The non-norm t ∈ F^× with s² = t in W_{E/F}.
    pub t: Vec<i64>,
    kweil: Vec<OnceLock<Result<KWeil>>>,
}

impl std::fmt::Debug for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Setting({:?})", self.sys.spec)
    }
}

impl Setting {
    pub fn new(spec: FieldSpec) -> Result<Setting> {
        Self::with_options(spec, NuHalf::Even, None)
    }

    pub fn with_options(spec: FieldSpec, nu_half: NuHalf, bounds: Option<Bounds>) -> Result<Setting> {
        let sys = FieldSystem::new(spec)?;
        let bounds = bounds.unwrap_or_else(|| Bounds::default_for(&spec));
        if bounds.max_conductor > spec.depth {
            return Err(Error::BoundTooLarge(format!(
                "conductor {} exceeds depth {}",
                bounds.max_conductor, spec.depth
            )));
        }
        let nk = sys.ks.len();
        let mut s = Setting {
            sys,
            ell: spec.ell,
            nu_half,
            bounds,
            omega: SmoothCharacter { domain: FieldTag::F, unif_value: RootOfUnity::ONE, unit_values: vec![] },
            t: Vec::new(),
            kweil: (0..nk).map(|_| OnceLock::new()).collect(),
        };
        let norm_imgs: Vec<Vec<i64>> = FieldSystem::generators(&s.sys.e).iter().map(|g| s.sys.norm(g)).collect();
        s.omega = s.quadratic_norm_character(&s.sys.f, &norm_imgs)?;
        s.t = s
            .sys
            .f
            .elements_by_valuation(1)
            .into_iter()
            .find(|x| s.eval(&s.omega, x).map(|v| !v.is_one()).unwrap_or(false))
            .expect("a non-norm exists");
        Ok(s)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.sys.spec
    }

    pub fn field(&self, tag: FieldTag) -> &LocalField {
        self.sys.field(tag)
    }

    pub fn k(&self, idx: u8) -> &KExt {
        self.sys.k(idx)
    }

    /// Galois-tower data for K_idx, computed on first use.
    pub fn kweil(&self, idx: u8) -> Result<&KWeil> {
        self.kweil[idx as usize].get_or_init(|| KWeil::build(self, idx)).as_ref().map_err(|e| e.clone())
    }

    /// The unique nontrivial quadratic character of `m^×` trivial on the
    /// listed norm images.
    pub fn quadratic_norm_character(&self, m: &LocalField, norm_imgs: &[Vec<i64>]) -> Result<SmoothCharacter> {
        let quad = self.enumerate_on(m, 2, m.depth as u32)?;
        let mut found = Vec::new();
        for c in quad.into_iter().filter(|c| !c.is_trivial()) {
            let mut ok = true;
            for x in norm_imgs {
                if !self.eval(&c, x)?.is_one() {
                    ok = false;
                    break;
                }
            }
            if ok {
                found.push(c);
            }
        }
        if found.len() != 1 {
            return Err(Error::DlogFailure(format!("{} candidate norm characters", found.len())));
        }
        Ok(found.pop().unwrap())
    }

    /// χ(x) for a nonzero element of χ's field.
    pub fn eval(&self, chi: &SmoothCharacter, x: &[i64]) -> Result<RootOfUnity> {
        let field = self.field(chi.domain);
        let (v, ex) = field.dlog(x)?;
        Ok(eval_exps(chi, v, &ex))
    }

    pub fn trivial(&self, tag: FieldTag) -> SmoothCharacter {
        SmoothCharacter::trivial(self.field(tag))
    }

    /// Pull back `chi` along a map sending each generator of `target` to an
    /// element of `chi`'s field.
    pub fn pullback(
        &self,
        target: FieldTag,
        chi: &SmoothCharacter,
        image: impl Fn(&[i64]) -> Result<Vec<i64>>,
    ) -> Result<SmoothCharacter> {
        let tf = self.field(target);
        let unif_value = self.eval(chi, &image(&tf.unif())?)?;
        let mut unit_values = Vec::with_capacity(tf.units.gens.len());
        for (g, &o) in tf.units.gens.iter().zip(&tf.units.orders) {
            let v = self.eval(chi, &image(g)?)?;
            if o % v.den() != 0 {
                return Err(Error::DlogFailure(format!(
                    "pulled-back value {v} has order incompatible with generator order {o}; depth too small"
                )));
            }
            unit_values.push(v);
        }
        Ok(SmoothCharacter { domain: target, unif_value, unit_values })
    }

    pub fn restrict_to_f(&self, chi: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(chi, FieldTag::E)?;
        self.pullback(FieldTag::F, chi, |x| Ok(self.sys.f_to_e(x)))
    }

    pub fn compose_norm(&self, eta: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(eta, FieldTag::F)?;
        self.pullback(FieldTag::E, eta, |x| Ok(self.sys.norm(x)))
    }

    pub fn galois_twist(&self, chi: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(chi, FieldTag::E)?;
        self.pullback(FieldTag::E, chi, |x| Ok(self.sys.sigma(x)))
    }

    /// χ ∘ N_{K/E} for a character of E^×.
    pub fn compose_norm_k(&self, idx: u8, chi: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(chi, FieldTag::E)?;
        let k = self.k(idx);
        self.pullback(FieldTag::K(idx), chi, |x| Ok(self.sys.norm_k(k, x)))
    }

    /// θ|_{E^×} for a character of K^×.
    pub fn restrict_k_to_e(&self, idx: u8, theta: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(theta, FieldTag::K(idx))?;
        let k = self.k(idx);
        self.pullback(FieldTag::E, theta, |x| Ok(self.sys.e_to_k(k, x)))
    }

    /// θ^τ with τ the generator of Gal(K/E).
    pub fn tau_twist(&self, idx: u8, theta: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(theta, FieldTag::K(idx))?;
        let k = self.k(idx);
        self.pullback(FieldTag::K(idx), theta, |x| Ok(self.sys.tau(k, x)))
    }

    /// θ ∘ σ̃ with σ̃ the chosen lift of σ to K.
    pub fn sigma_twist_k(&self, idx: u8, theta: &SmoothCharacter) -> Result<SmoothCharacter> {
        check_domain(theta, FieldTag::K(idx))?;
        let k = self.k(idx);
        self.pullback(FieldTag::K(idx), theta, |x| self.sys.sigma_k(k, x))
    }

    pub fn is_trivial_on_f(&self, chi: &SmoothCharacter) -> Result<bool> {
        Ok(self.restrict_to_f(chi)?.is_trivial())
    }

    pub fn is_galois_invariant(&self, chi: &SmoothCharacter) -> Result<bool> {
        Ok(&self.galois_twist(chi)? == chi)
    }

    pub fn is_trivial_on_e1(&self, chi: &SmoothCharacter) -> Result<bool> {
        let (_, gens) = self.sys.norm_one_subgroup();
        for g in gens {
            if !self.eval(chi, &g)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn q_of(&self, tag: FieldTag) -> u64 {
        self.field(tag).q()
    }

    /// ν on the given field: unramified, ν(ϖ) = q^{-1} mod ℓ.
    pub fn nu(&self, tag: FieldTag) -> SmoothCharacter {
        let ell = self.ell;
        let q_inv = mod_inv((self.q_of(tag) % ell) as i64, ell as i64).expect("q prime to ell") as u32;
        let fl = Fq::get(ell, 1).expect("prime field");
        let mut c = self.trivial(tag);
        c.unif_value = fl.dlog(Ff(q_inv)).expect("nonzero");
        c
    }

    /// The fixed square root ν^{1/2}.
    pub fn nu_half(&self, tag: FieldTag) -> SmoothCharacter {
        self.nu_half_with(tag, self.nu_half)
    }

    /// ν^{1/2} under a given convention. On an unramified E the even root
    /// is the norm-compatible one, `ϖ_E ↦ q_F^{-1}`, and the odd root is its
    /// negative; elsewhere the parity rule of [`half_root`] applies.
    pub fn nu_half_with(&self, tag: FieldTag, conv: NuHalf) -> SmoothCharacter {
        let mut c = self.nu(tag);
        if tag == FieldTag::E && self.sys.spec.ext == ExtType::Unramified {
            let mut root = self.nu(FieldTag::F).unif_value;
            if conv == NuHalf::Odd {
                root = root.mul(RootOfUnity::MINUS_ONE);
            }
            c.unif_value = root;
        } else {
            c.unif_value = half_root(c.unif_value, conv);
        }
        c
    }

    /// Characters of `field` with ϖ-value order dividing the prime-to-ℓ part
    /// of `max_unif_order`, trivial on U^{max_conductor}; fixed order.
    pub fn enumerate_on(
        &self,
        field: &LocalField,
        max_unif_order: u64,
        max_conductor: u32,
    ) -> Result<Vec<SmoothCharacter>> {
        if max_conductor as usize > field.depth {
            return Err(Error::BoundTooLarge(format!(
                "conductor {max_conductor} exceeds depth {} of {:?}",
                field.depth, field.tag
            )));
        }
        let m = prime_to_part(max_unif_order.max(1), self.ell);
        let units = self.unit_characters(field, max_conductor as usize)?;
        if units.len() as u64 * m > 2_000_000 {
            return Err(Error::BoundTooLarge(format!("{} characters", units.len() as u64 * m)));
        }
        let mut out = Vec::with_capacity(units.len() * m as usize);
        for k in 0..m {
            for u in &units {
                out.push(SmoothCharacter {
                    domain: field.tag,
                    unif_value: RootOfUnity::new(k as i64, m),
                    unit_values: u.clone(),
                });
            }
        }
        Ok(out)
    }

    pub fn enumerate_characters(
        &self,
        tag: FieldTag,
        max_unif_order: u64,
        max_conductor: u32,
    ) -> Result<Vec<SmoothCharacter>> {
        let field = self.field(tag);
        let c = match tag {
            FieldTag::E => max_conductor,
            FieldTag::F => max_conductor.div_ceil(self.sys.spec.e()),
            FieldTag::K(i) => max_conductor * self.k(i).field.tower.e(2) as u32 / self.sys.spec.e(),
        };
        self.enumerate_on(field, max_unif_order, c.min(field.depth as u32))
    }

    /// E-characters under the configured bounds.
    pub fn e_characters(&self) -> Result<Vec<SmoothCharacter>> {
        self.enumerate_characters(FieldTag::E, self.bounds.max_unif_order, self.bounds.max_conductor)
    }

    /// F-characters with twice the ϖ-order bound of E.
    pub fn f_characters(&self) -> Result<Vec<SmoothCharacter>> {
        self.enumerate_characters(FieldTag::F, 2 * self.bounds.max_unif_order, self.bounds.max_conductor)
    }

    pub fn quadratic_characters(&self, tag: FieldTag) -> Result<Vec<SmoothCharacter>> {
        let field = self.field(tag);
        Ok(self.enumerate_on(field, 2, field.depth as u32)?.into_iter().filter(|c| c.is_quadratic()).collect())
    }

    /// Tuples of unit values (prime-to-ℓ orders) trivial on U^c.
    fn unit_characters(&self, field: &LocalField, c: usize) -> Result<Vec<Vec<RootOfUnity>>> {
        let orders: Vec<u64> = field.units.orders.iter().map(|&o| prime_to_part(o, self.ell)).collect();
        let total: u64 = orders.iter().product();
        if total > 2_000_000 {
            return Err(Error::BoundTooLarge(format!("{total} unit characters")));
        }
        let kernel: Vec<Vec<u64>> = if c == 0 {
            field.units.elements().into_iter().map(|(_, e)| e).collect()
        } else if c >= field.depth {
            Vec::new()
        } else {
            let one = field.tower.reduce(field.h, &field.one(), c);
            let members: Vec<Vec<u64>> = field
                .units
                .elements()
                .into_iter()
                .filter(|(u, _)| field.tower.reduce(field.h, u, c) == one)
                .map(|(_, e)| e)
                .collect();
            let mut gens: Vec<Vec<u64>> = Vec::new();
            let mut span = crate::localfield::subgroup_closure(&field.units.orders, &gens);
            for e in members {
                if !span.contains(&e) {
                    gens.push(e);
                    span = crate::localfield::subgroup_closure(&field.units.orders, &gens);
                }
            }
            gens
        };
        let mut out = vec![Vec::new()];
        for &o in &orders {
            let mut next = Vec::with_capacity(out.len() * o as usize);
            for v in &out {
                for k in 0..o {
                    let mut w: Vec<RootOfUnity> = v.clone();
                    w.push(RootOfUnity::new(k as i64, o));
                    next.push(w);
                }
            }
            out = next;
        }
        out.retain(|vals| {
            kernel
                .iter()
                .all(|ex| vals.iter().zip(ex).fold(RootOfUnity::ONE, |acc, (v, &e)| acc.mul(v.pow(e as i64))).is_one())
        });
        Ok(out)
    }

    /// All characters of `big` whose pullback along `embed` is `chi`.
    pub fn extensions(
        &self,
        big: FieldTag,
        chi: &SmoothCharacter,
        embed: impl Fn(&[i64]) -> Vec<i64>,
    ) -> Result<Vec<SmoothCharacter>> {
        let sf = self.field(chi.domain);
        let mut cons = vec![(embed(&sf.unif()), chi.unif_value)];
        for (g, &want) in sf.units.gens.iter().zip(&chi.unit_values) {
            cons.push((embed(g), want));
        }
        self.solve_characters(big, &cons)
    }

    /// All characters of `tag` taking the prescribed values on the listed
    /// elements. At least one element must have nonzero valuation.
    pub fn solve_characters(&self, tag: FieldTag, cons: &[(Vec<i64>, RootOfUnity)]) -> Result<Vec<SmoothCharacter>> {
        let f = self.field(tag);
        let cons: Vec<(i64, Vec<u64>, RootOfUnity)> =
            cons.iter().map(|(x, want)| f.dlog(x).map(|(v, ex)| (v, ex, *want))).collect::<Result<_>>()?;
        if cons.iter().all(|c| c.0 == 0) {
            return Err(Error::BoundTooLarge("uniformizer value is unconstrained".into()));
        }
        let apply = |vals: &[RootOfUnity], ex: &[u64]| {
            vals.iter().zip(ex).fold(RootOfUnity::ONE, |acc, (v, &k)| acc.mul(v.pow(k as i64)))
        };
        let mut out = Vec::new();
        'units: for vals in self.unit_characters(f, f.depth)? {
            let mut cands: Option<Vec<RootOfUnity>> = None;
            for (v, ex, want) in &cons {
                let r = want.div(apply(&vals, ex));
                if *v == 0 {
                    if !r.is_one() {
                        continue 'units;
                    }
                    continue;
                }
                let r = if *v < 0 { r.inv() } else { r };
                let roots = r.roots(v.unsigned_abs(), self.ell);
                cands = Some(match cands {
                    None => roots,
                    Some(c) => c.into_iter().filter(|z| roots.contains(z)).collect(),
                });
            }
            for r in cands.unwrap_or_default() {
                out.push(SmoothCharacter { domain: tag, unif_value: r, unit_values: vals.clone() });
            }
        }
        out.sort();
        Ok(out)
    }

    /// Characters η of F^× with η∘N_{E/F} = χ.
    pub fn norm_preimages(&self, chi: &SmoothCharacter) -> Result<Vec<SmoothCharacter>> {
        check_domain(chi, FieldTag::E)?;
        let e = &self.sys.e;
        let mut cons = vec![(self.sys.norm(&e.unif()), chi.unif_value)];
        for (g, &want) in e.units.gens.iter().zip(&chi.unit_values) {
            cons.push((self.sys.norm(g), want));
        }
        self.solve_characters(FieldTag::F, &cons)
    }

    pub fn extensions_to_e(&self, chi_f: &SmoothCharacter) -> Result<Vec<SmoothCharacter>> {
        check_domain(chi_f, FieldTag::F)?;
        self.extensions(FieldTag::E, chi_f, |x| self.sys.f_to_e(x))
    }

    /// The first extension of χ_F to E^× in the fixed order.
    pub fn extend_to_e(&self, chi_f: &SmoothCharacter) -> Result<SmoothCharacter> {
        self.extensions_to_e(chi_f)?.into_iter().next().ok_or(Error::ExtensionNotFound)
    }

    pub fn extensions_to_k(&self, idx: u8, chi_e: &SmoothCharacter) -> Result<Vec<SmoothCharacter>> {
        check_domain(chi_e, FieldTag::E)?;
        let k = self.k(idx);
        self.extensions(FieldTag::K(idx), chi_e, |x| self.sys.e_to_k(k, x))
    }

    /// Whether χ·χ^σ = 1 and the restriction lies in {1, ω}: both sides of
    /// the conjugate-selfduality criterion for characters.
    pub fn restriction_class(&self, chi: &SmoothCharacter) -> Result<RestrictionClass> {
        let r = self.restrict_to_f(chi)?;
        Ok(if r.is_trivial() {
            RestrictionClass::Trivial
        } else if r == self.omega {
            RestrictionClass::Omega
        } else {
            RestrictionClass::Other
        })
    }

    /// Smallest field containing every value of the listed characters.
    pub fn field_for(&self, chars: &[&SmoothCharacter]) -> Result<std::sync::Arc<Fq>> {
        let orders: BTreeSet<u64> = chars.iter().flat_map(|c| c.values().map(|v| v.den())).chain([2]).collect();
        Fq::for_orders(self.ell, orders)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionClass {
    Trivial,
    Omega,
    Other,
}

pub fn eval_exps(chi: &SmoothCharacter, v: i64, ex: &[u64]) -> RootOfUnity {
    chi.unit_values.iter().zip(ex).fold(chi.unif_value.pow(v), |acc, (val, &e)| acc.mul(val.pow(e as i64)))
}

fn check_domain(chi: &SmoothCharacter, tag: FieldTag) -> Result<()> {
    if chi.domain != tag {
        return Err(Error::WrongField);
    }
    Ok(())
}

/// Square root of an ℓ'-root of unity by the parity rule.
///
/// With `z = a/m` the two roots are `a/2m` and `(a+m)/2m`. `Even` takes the
/// one whose reduced numerator is even, falling back to `a/2m` when the
/// parities agree; `Odd` takes the other.
pub fn half_root(z: RootOfUnity, conv: NuHalf) -> RootOfUnity {
    let (a, m) = (z.num() as i64, z.den());
    let r1 = RootOfUnity::new(a, 2 * m);
    let r2 = RootOfUnity::new(a + m as i64, 2 * m);
    let even = match (r1.num() % 2 == 0, r2.num() % 2 == 0) {
        (false, true) => r2,
        _ => r1,
    };
    let odd = if even == r1 { r2 } else { r1 };
    match conv {
        NuHalf::Even => even,
        NuHalf::Odd => odd,
    }
}
