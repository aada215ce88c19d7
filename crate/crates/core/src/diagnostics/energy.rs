use crate::ap_solver::{total_mass, Trajectory};
use crate::constitutive::ConstitutiveModel;
use crate::grid::GridFunction;
use crate::io::{csv_row, fmt_real};
use crate::pressure::PressureField;
use crate::Real;

/// `phi(z) = 1/2 |z_x|_H^2 + h1 z(1) - h0 z(0)` with `h0, h1` the boundary
/// values of `p_x` at the current time.
pub fn phi_t<T: Real>(z: &GridFunction<T>, h0: T, h1: T) -> T {
    let (z0, z1) = z.boundary_trace();
    T::lit(0.5) * z.seminorm_x_sq() + h1 * z1 - h0 * z0
}

/// Per-frame norms and functionals of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace<T> {
    pub times: Vec<T>,
    pub norm_h: Vec<T>,
    pub norm_x_seminorm: Vec<T>,
    pub sup: Vec<T>,
    /// `phi^t(kirchhoff(u(t)))`
    pub phi: Vec<T>,
    /// `int rho_hat(psi(u)) dx`
    pub lyapunov: Vec<T>,
    /// `int psi(u) dx`, the same sum the mass ledger records.
    pub mass: Vec<T>,
    pub warnings: Vec<String>,
}

impl<T: Real> EnergyTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV `step,t,norm_H,norm_X_seminorm,sup,phi,lyapunov,mass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,t,norm_H,norm_X_seminorm,sup,phi,lyapunov,mass\n");
        for i in 0..self.len() {
            let mut row = vec![i.to_string()];
            row.extend(
                [
                    self.times[i],
                    self.norm_h[i],
                    self.norm_x_seminorm[i],
                    self.sup[i],
                    self.phi[i],
                    self.lyapunov[i],
                    self.mass[i],
                ]
                .iter()
                .map(|v| fmt_real(v.as_f64())),
            );
            out.push_str(&csv_row(row));
        }
        out
    }
}

/// Evaluates the trace quantities frame by frame and checks two lower bounds:
/// the coercivity of `phi^t`,
/// `phi^t(kirchhoff(u)) >= -2 sqrt(2) |p_x|_inf |kirchhoff(u)|_H - 4 |p_x|_inf^2`,
/// and `int rho_hat(psi(u)) >= delta_psi^2 / (2 C_psi) |u|_H^2`.
pub fn energy_trace<T: Real>(
    u: &Trajectory<T>,
    model: &ConstitutiveModel<T>,
    pressure: &PressureField<T>,
) -> EnergyTrace<T> {
    let n = u.frames().len();
    let mut trace = EnergyTrace {
        times: u.times().to_vec(),
        norm_h: Vec::with_capacity(n),
        norm_x_seminorm: Vec::with_capacity(n),
        sup: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        lyapunov: Vec::with_capacity(n),
        mass: Vec::with_capacity(n),
        warnings: Vec::new(),
    };
    let sup_px = pressure.sup_px();
    let two = T::lit(2.0);
    let coercive_offset = T::lit(4.0) * sup_px * sup_px;
    let b = model.bounds;
    let lyapunov_factor = b.delta_psi * b.delta_psi / (two * b.c_psi);
    let dx = u.grid().dx();

    for (step, (&t, frame)) in u.times().iter().zip(u.frames()).enumerate() {
        let v = frame.map(|x| model.kirchhoff(x));
        let (h0, h1) = pressure.boundary_gradient(t);
        let phi = phi_t(&v, h0, h1);
        let coercive = -two * two.sqrt() * sup_px * v.norm_h() - coercive_offset;
        if !(phi >= coercive) {
            trace.warnings.push(format!(
                "WARN coercivity: step {step} (t = {t}) has phi = {phi:e} below {coercive:e}"
            ));
        }

        let mut lyapunov = T::zero();
        for &x in frame.values() {
            match model.rho_hat_of_potential(x) {
                Ok(r) => lyapunov = lyapunov + r,
                Err(e) => {
                    trace
                        .warnings
                        .push(format!("WARN lyapunov: step {step}: {e}"));
                    lyapunov = T::nan();
                    break;
                }
            }
        }
        let lyapunov = lyapunov * dx;
        let floor = lyapunov_factor * frame.norm_h_sq();
        if lyapunov.is_finite() && lyapunov < floor {
            trace.warnings.push(format!(
                "WARN lyapunov bound: step {step} (t = {t}) has {lyapunov:e} below {floor:e}"
            ));
        }

        trace.norm_h.push(frame.norm_h());
        trace.norm_x_seminorm.push(frame.seminorm_x_sq().sqrt());
        trace.sup.push(frame.sup_norm());
        trace.phi.push(phi);
        trace.lyapunov.push(lyapunov);
        trace.mass.push(total_mass(model, frame));
    }
    trace
}
