//! Mean-field model of a community embedded in `D` dimensions.
//!
//! Agents are lumped into a single volume `V`. The shared infrastructure is
//! a serialized network of Hausdorff dimension `H` whose volume `V_I` feeds
//! the `N_I` connected agents. Balancing interaction cost against supply
//! through the infrastructure fixes the steady-state volume, and every
//! output class then scales as a power of the population.
//!
//! All inequalities of the model are evaluated at their bound. Exponents
//! are exact rationals whenever `H` is rational.

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// An exact scaling exponent.
pub type Exponent = Ratio<i64>;

/// Errors raised by the mean-field model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeanFieldError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

type Result<T> = std::result::Result<T, MeanFieldError>;

fn invalid(name: &'static str, reason: impl Into<String>) -> MeanFieldError {
    MeanFieldError::InvalidParam { name, reason: reason.into() }
}

fn domain(msg: impl Into<String>) -> MeanFieldError {
    MeanFieldError::Domain(msg.into())
}

/// Converts an exact exponent to `f64`.
pub fn to_f64(e: Exponent) -> f64 {
    e.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3/2"`, `"1.5"` or `"2"` into an exact ratio.
pub fn parse_ratio(s: &str) -> Option<Exponent> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().ok()?;
        let den: i64 = den.trim().parse().ok()?;
        return (den != 0).then(|| Ratio::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) || frac.len() > 15 {
        return None;
    }
    let scale = 10i64.checked_pow(frac.len() as u32)?;
    let int: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    let num = int.checked_mul(scale)?.checked_add(frac)?;
    let r = Ratio::new(num, scale);
    Some(if neg { -r } else { r })
}

/// Coupling constants of the model. All strictly positive; `infra_span ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    /// `g_I`: fraction of connected nodes spanned by the infrastructure.
    pub infra_span: f64,
    /// `g_Y`: yield coupling of the interaction links (money).
    pub yield_coupling: f64,
    /// `G_Y`: interaction yield coupling (money·volume).
    pub interaction_coupling: f64,
    /// `c_Y`: transport cost per unit path length (money·length^−H).
    pub transport_cost: f64,
    /// `v_Y`: process volume coefficient.
    pub process_volume: f64,
    /// `L`: fixed cross-section length scale.
    pub length_scale: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            infra_span: 1.0,
            yield_coupling: 1.0,
            interaction_coupling: 1.0,
            transport_cost: 1.0,
            process_volume: 1.0,
            length_scale: 1.0,
        }
    }
}

/// Dimensions and couplings of the mean-field model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    dimension: u32,
    hausdorff: Exponent,
    couplings: Couplings,
}

impl ScalingParams {
    /// Embedding dimension `D ≥ 1`, Hausdorff dimension `0 ≤ H ≤ D`, unit couplings.
    pub fn new(dimension: u32, hausdorff: Exponent) -> Result<Self> {
        Self::with_couplings(dimension, hausdorff, Couplings::default())
    }

    pub fn with_couplings(dimension: u32, hausdorff: Exponent, couplings: Couplings) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("D", "embedding dimension must be at least 1"));
        }
        if hausdorff < Exponent::zero() || hausdorff > Exponent::from(dimension as i64) {
            return Err(invalid("H", format!("must lie in [0, D], got {hausdorff}")));
        }
        let positive = [
            ("g_I", couplings.infra_span),
            ("g_Y", couplings.yield_coupling),
            ("G_Y", couplings.interaction_coupling),
            ("c_Y", couplings.transport_cost),
            ("v_Y", couplings.process_volume),
            ("L", couplings.length_scale),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, format!("must be finite and positive, got {value}")));
            }
        }
        if couplings.infra_span > 1.0 {
            return Err(invalid("g_I", "span fraction cannot exceed 1"));
        }
        Ok(ScalingParams { dimension, hausdorff, couplings })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn hausdorff(&self) -> Exponent {
        self.hausdorff
    }

    pub fn couplings(&self) -> &Couplings {
        &self.couplings
    }

    fn d(&self) -> Exponent {
        Exponent::from(self.dimension as i64)
    }

    fn d_f64(&self) -> f64 {
        self.dimension as f64
    }

    fn h_f64(&self) -> f64 {
        to_f64(self.hausdorff)
    }

    /// Prefactor `a = (g_Y v_Y / c_Y)^{D/(D+H)}` of the equilibrium volume.
    pub fn volume_prefactor(&self) -> f64 {
        let c = &self.couplings;
        let exp = to_f64(self.d() / (self.d() + self.hausdorff));
        (c.yield_coupling * c.process_volume / c.transport_cost).powf(exp)
    }
}

/// Active (`N_I`) and inactive (`N_0`) agent counts. `N = N_I + N_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Population {
    active: f64,
    inactive: f64,
}

impl Population {
    pub fn new(active: f64, inactive: f64) -> Result<Self> {
        for (name, v) in [("N_I", active), ("N_0", inactive)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, format!("must be finite and non-negative, got {v}")));
            }
        }
        Ok(Population { active, inactive })
    }

    /// Everyone is connected: `N_I = N`, `N_0 = 0`.
    pub fn pervasive(n: f64) -> Result<Self> {
        Self::new(n, 0.0)
    }

    /// Splits a total `n` so that `N_0 = inactive_fraction · n`.
    pub fn with_inactive_fraction(n: f64, inactive_fraction: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&inactive_fraction) {
            return Err(invalid("inactive_fraction", "must lie in [0, 1)"));
        }
        let inactive = inactive_fraction * n;
        Self::new(n - inactive, inactive)
    }

    pub fn active(&self) -> f64 {
        self.active
    }

    pub fn inactive(&self) -> f64 {
        self.inactive
    }

    pub fn total(&self) -> f64 {
        self.active + self.inactive
    }
}

/// Per-capita consumption coefficients `e_−`, `e_+` (money).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsumptionCoeffs {
    pub input: f64,
    pub output: f64,
}

impl ConsumptionCoeffs {
    pub fn new(input: f64, output: f64) -> Result<Self> {
        if !(input >= 0.0 && output >= 0.0) {
            return Err(invalid("e", "consumption coefficients must be non-negative"));
        }
        Ok(ConsumptionCoeffs { input, output })
    }
}

/// The dependency configurations, each with its own exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingClass {
    /// Shared infrastructure volume; sublinear.
    InfrastructureVolume,
    /// Per-capita consumption by independent agents.
    LinearConsumption,
    /// Output from interactions across the whole mesh.
    Interaction,
    /// Output proportional to a sparse population of specialists.
    ScarceAgent,
    /// Interaction output conditional on an exterior specialist dependency.
    ScarceDependency,
    /// Dependency hidden inside a superagent, feeding the same infrastructure twice.
    RecursiveDependency,
    /// Discovery through a virtual channel with no transport cost.
    VirtualInteraction,
}

impl ScalingClass {
    pub const ALL: [ScalingClass; 7] = [
        ScalingClass::InfrastructureVolume,
        ScalingClass::LinearConsumption,
        ScalingClass::Interaction,
        ScalingClass::ScarceAgent,
        ScalingClass::ScarceDependency,
        ScalingClass::RecursiveDependency,
        ScalingClass::VirtualInteraction,
    ];

    /// Stable snake_case name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            ScalingClass::InfrastructureVolume => "infrastructure_volume",
            ScalingClass::LinearConsumption => "linear_consumption",
            ScalingClass::Interaction => "interaction",
            ScalingClass::ScarceAgent => "scarce_agent",
            ScalingClass::ScarceDependency => "scarce_dependency",
            ScalingClass::RecursiveDependency => "recursive_dependency",
            ScalingClass::VirtualInteraction => "virtual_interaction",
        }
    }

    /// Accepts the snake_case name or its kebab-case spelling.
    pub fn from_name(name: &str) -> Option<Self> {
        let norm = name.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL.into_iter().find(|c| c.name() == norm)
    }
}

impl std::fmt::Display for ScalingClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// `δ = H² / (D(D+H))`; equals `1/(D(D+1))` at `H = 1`.
pub fn delta_exponent(params: &ScalingParams) -> Exponent {
    let d = params.d();
    let h = params.hausdorff;
    h * h / (d * (d + h))
}

/// Exponent of `N` (total population) in the interaction yield at
/// equilibrium: `(2HD + H²) / (D(D+H))`.
fn population_share(params: &ScalingParams) -> Exponent {
    let d = params.d();
    let h = params.hausdorff;
    (Exponent::from(2) * h * d + h * h) / (d * (d + h))
}

/// `V_I = g_I · V^{H/D} · L^{D−H} · N_I · N^{−H/D}`.
pub fn infrastructure_volume(volume: f64, pop: &Population, params: &ScalingParams) -> Result<f64> {
    if !(volume.is_finite() && volume > 0.0) {
        return Err(domain(format!("volume must be positive, got {volume}")));
    }
    let n = pop.total();
    if n <= 0.0 {
        return Err(domain("population is zero"));
    }
    let c = &params.couplings;
    let h_over_d = params.h_f64() / params.d_f64();
    let d_minus_h = params.d_f64() - params.h_f64();
    Ok(c.infra_span
        * volume.powf(h_over_d)
        * c.length_scale.powf(d_minus_h)
        * pop.active
        * n.powf(-h_over_d))
}

/// Sustainable steady-state volume `V = a · (N_I²/N)^{D/(D+H)}`.
pub fn equilibrium_volume(pop: &Population, params: &ScalingParams) -> Result<f64> {
    if pop.total() <= 0.0 || pop.active <= 0.0 {
        return Err(domain("equilibrium volume needs N_I > 0"));
    }
    let exp = to_f64(params.d() / (params.d() + params.hausdorff));
    Ok(params.volume_prefactor() * (pop.active * pop.active / pop.total()).powf(exp))
}

/// Interaction yield `Y⁺ = G_Y · N_I² / V_I`, with `V_I` evaluated at the
/// equilibrium volume.
pub fn yield_output(pop: &Population, params: &ScalingParams) -> Result<f64> {
    let v = equilibrium_volume(pop, params)?;
    let vi = infrastructure_volume(v, pop, params)?;
    Ok(params.couplings.interaction_coupling * pop.active * pop.active / vi)
}

/// Per-capita consumption: `(e_− N, e_+ N)`.
pub fn linear_consumption(pop: &Population, coeffs: &ConsumptionCoeffs) -> (f64, f64) {
    let n = pop.total();
    (coeffs.input * n, coeffs.output * n)
}

/// Predicted exponent of `N` for a pervasive network (`N ≈ N_I`).
///
/// The non-pervasive case is not a pure power law; callers pass
/// `pervasive = false` only by mistake, and get an error pointing them at
/// [`correction_factor`].
pub fn predicted_exponent(class: ScalingClass, params: &ScalingParams, pervasive: bool) -> Result<Exponent> {
    if !pervasive {
        return Err(MeanFieldError::Unsupported(
            "exponent is defined for N ≈ N_I; use correction_factor for the inactive share".into(),
        ));
    }
    let delta = delta_exponent(params);
    let one = Exponent::from(1);
    let d = params.d();
    Ok(match class {
        ScalingClass::InfrastructureVolume => one - delta,
        ScalingClass::LinearConsumption => one,
        ScalingClass::Interaction => one + delta,
        ScalingClass::ScarceAgent => delta,
        ScalingClass::ScarceDependency => one + delta * 2,
        ScalingClass::RecursiveDependency => {
            require_serial(params)?;
            one + one / (d * d) - one / (d * (d + one))
        }
        ScalingClass::VirtualInteraction => params.hausdorff / d,
    })
}

fn require_serial(params: &ScalingParams) -> Result<()> {
    if params.hausdorff != Exponent::from(1) {
        return Err(MeanFieldError::Unsupported(format!(
            "recursive dependency is only derived for H = 1, got H = {}",
            params.hausdorff
        )));
    }
    Ok(())
}

/// Exponent carried by `N/N_I = 1 + N_0/N_I` in each class's output once
/// the equilibrium volume is substituted.
///
/// Composing `V_I` with the equilibrium volume gives, per class,
/// `N_I^{a} · N^{b}`; this returns `b`, the part the pervasive exponent
/// misses when `N_0 > 0`. With `Q = (2HD + H²)/(D(D+H))`:
/// interaction and scarce agent carry `Q`, infrastructure `−Q`, scarce
/// dependency `2Q`, the nested recursive volume `1/(D(D+1))` and the
/// virtual channel `−H/D`. Linear consumption is counted over all `N`
/// agents and carries no correction.
pub fn population_exponent(class: ScalingClass, params: &ScalingParams) -> Result<Exponent> {
    let q = population_share(params);
    let d = params.d();
    Ok(match class {
        ScalingClass::InfrastructureVolume => -q,
        ScalingClass::LinearConsumption => Exponent::zero(),
        ScalingClass::Interaction | ScalingClass::ScarceAgent => q,
        ScalingClass::ScarceDependency => q * 2,
        ScalingClass::RecursiveDependency => {
            require_serial(params)?;
            Exponent::from(1) / (d * (d + 1))
        }
        ScalingClass::VirtualInteraction => -params.hausdorff / d,
    })
}

/// `(1 + N_0/N_I)^{b}` with `b` from [`population_exponent`]: the factor by
/// which the class output differs from its pervasive value at the same `N_I`
/// (linear consumption excepted, as above).
/// At `D = 2`, `H = 1` the interaction factor is `(1 + N_0/N_I)^{5/6}`.
pub fn correction_factor(class: ScalingClass, pop: &Population, params: &ScalingParams) -> Result<f64> {
    if pop.active <= 0.0 {
        return Err(domain("correction factor needs N_I > 0"));
    }
    let exp = population_exponent(class, params)?;
    if pop.inactive == 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 + pop.inactive / pop.active).powf(to_f64(exp)))
}

/// Average node degree utilization `k = N_I / V_I` at volume `V`.
pub fn node_degree(pop: &Population, volume: f64, params: &ScalingParams) -> Result<f64> {
    let vi = infrastructure_volume(volume, pop, params)?;
    if vi <= 0.0 {
        return Err(domain("infrastructure volume is zero"));
    }
    Ok(pop.active / vi)
}

/// Infrastructure agents needed for `n_client` clients at the given valency:
/// `(α_− / α_+) · N_client / valency`.
pub fn infra_agent_count(n_client: f64, valency: f64, alpha_minus: f64, alpha_plus: f64) -> Result<f64> {
    if !(valency >= 1.0) {
        return Err(domain(format!("valency must be at least 1, got {valency}")));
    }
    if !(alpha_plus > 0.0 && alpha_plus <= 1.0) {
        return Err(domain(format!("alpha_plus must lie in (0, 1], got {alpha_plus}")));
    }
    if !(0.0..=1.0).contains(&alpha_minus) {
        return Err(domain(format!("alpha_minus must lie in [0, 1], got {alpha_minus}")));
    }
    if !(n_client >= 0.0) {
        return Err(domain("client count must be non-negative"));
    }
    Ok(alpha_minus / alpha_plus * n_client / valency)
}

/// Clients fed to one infrastructure agent when the users of a catchment
/// volume are serialized along a tube of fixed cross-section:
/// `(V_catchment / N_users)^{1/D} · C · N_users`.
pub fn serialized_client_count(v_catchment: f64, n_users: f64, dimension: u32, cross_section: f64) -> Result<f64> {
    if !(v_catchment > 0.0) {
        return Err(domain("catchment volume must be positive"));
    }
    if !(n_users > 0.0) {
        return Err(domain("user count must be positive"));
    }
    if dimension == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    if !(cross_section > 0.0) {
        return Err(domain("cross section must be positive"));
    }
    Ok((v_catchment / n_users).powf(1.0 / dimension as f64) * cross_section * n_users)
}

/// How agents discover one another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Transport through the city: range grows with its linear size.
    Physical,
    /// Messaging: range is set by bandwidth, not geometry.
    Virtual,
}

/// Parameters of idea/impulse discovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpulseParams {
    /// `r`: exploration speed in city sizes per unit time.
    pub speed: f64,
    /// `T_explore`.
    pub explore_time: f64,
    /// `B`: channel bandwidth, impulses per unit time.
    pub bandwidth: f64,
    /// Impulse density per unit length.
    pub density: f64,
    /// `α_τ`: probability of being receptive to an impulse.
    pub receptivity: f64,
    pub physical_weight: f64,
    pub virtual_weight: f64,
    /// `N_D`: agents per workgroup.
    pub workgroup_size: f64,
    /// `N_W`: number of workgroups.
    pub workgroups: f64,
}

impl ImpulseParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.receptivity) {
            return Err(invalid("alpha_tau", "receptivity must lie in [0, 1]"));
        }
        let rest = [
            ("r", self.speed),
            ("T_explore", self.explore_time),
            ("B", self.bandwidth),
            ("density", self.density),
            ("c_phys", self.physical_weight),
            ("c_virt", self.virtual_weight),
            ("N_D", self.workgroup_size),
            ("N_W", self.workgroups),
        ];
        for (name, v) in rest {
            if !(v.is_finite() && v >= 0.0) {
                return Err(invalid(name, "must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Impulses collected during one exploration.
///
/// Physical: `r · T · V^{1/D} · density · α_τ`. Virtual: `B · T · density · α_τ`.
pub fn impulse_rate(channel: Channel, volume: f64, p: &ImpulseParams, dimension: u32) -> Result<f64> {
    p.validate()?;
    match channel {
        Channel::Physical => {
            if !(volume > 0.0) {
                return Err(domain("physical discovery needs a positive volume"));
            }
            if dimension == 0 {
                return Err(domain("dimension must be at least 1"));
            }
            let range = volume.powf(1.0 / dimension as f64);
            Ok(p.speed * p.explore_time * range * p.density * p.receptivity)
        }
        Channel::Virtual => Ok(p.bandwidth * p.explore_time * p.density * p.receptivity),
    }
}

/// City-wide idea rate `N_W · N_D · (c_phys I_phys + c_virt I_virt)`.
pub fn city_idea_rate(p: &ImpulseParams, i_phys: f64, i_virt: f64) -> f64 {
    p.workgroups * p.workgroup_size * (p.physical_weight * i_phys + p.virtual_weight * i_virt)
}

/// The modelled quantity of each class for a population at equilibrium.
///
/// * infrastructure volume: `V_I(V_eq)`
/// * linear consumption: `g_Y · N`
/// * interaction: [`yield_output`]
/// * scarce agent: `G_Y · N_I / V_I` (specialists using the shared infrastructure)
/// * scarce dependency: interaction yield times `v_Y · N_I / V_I`, one
///   economy of scale for the output and one for its dependency
/// * recursive dependency: `G_Y N_I² / V_nested` with the nested volume
///   `g_I L^{D−1} (V/N_I)^{1/D²} N_I` (serial infrastructure only)
/// * virtual interaction: `G_Y · N_I^{H/D} · (1 + N_0/N_I)^{−H/D}`
pub fn class_output(class: ScalingClass, pop: &Population, params: &ScalingParams) -> Result<f64> {
    let c = &params.couplings;
    if pop.active <= 0.0 {
        return Err(domain("class output needs N_I > 0"));
    }
    match class {
        ScalingClass::InfrastructureVolume => {
            let v = equilibrium_volume(pop, params)?;
            infrastructure_volume(v, pop, params)
        }
        ScalingClass::LinearConsumption => Ok(c.yield_coupling * pop.total()),
        ScalingClass::Interaction => yield_output(pop, params),
        ScalingClass::ScarceAgent => {
            let v = equilibrium_volume(pop, params)?;
            Ok(c.interaction_coupling * node_degree(pop, v, params)?)
        }
        ScalingClass::ScarceDependency => {
            let v = equilibrium_volume(pop, params)?;
            let k = node_degree(pop, v, params)?;
            Ok(yield_output(pop, params)? * c.process_volume * k)
        }
        ScalingClass::RecursiveDependency => {
            require_serial(params)?;
            let v = equilibrium_volume(pop, params)?;
            let d = params.d_f64();
            let nested = c.infra_span
                * c.length_scale.powf(d - 1.0)
                * (v / pop.active).powf(1.0 / (d * d))
                * pop.active;
            Ok(c.interaction_coupling * pop.active * pop.active / nested)
        }
        ScalingClass::VirtualInteraction => {
            let h_over_d = params.h_f64() / params.d_f64();
            let spread = 1.0 + pop.inactive / pop.active;
            Ok(c.interaction_coupling * pop.active.powf(h_over_d) * spread.powf(-h_over_d))
        }
    }
}
