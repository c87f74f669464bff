//! Synthetic ORM models of adjustable size for the benchmarks.

use std::fmt::Write;

/// A chain of `n` object types `T0 … T{n-1}`, each linked to the next by a
/// binary fact type with a mandatory role and a uniqueness constraint.
/// Every third type also gets a subtype, and every fourth link a frequency
/// constraint.
pub fn chain(n: usize) -> String {
    let mut s = String::new();
    for k in 0..n {
        writeln!(s, "object T{k};").unwrap();
    }
    for k in 0..n.saturating_sub(1) {
        let next = k + 1;
        writeln!(s, "fact link{k} (T{k}, T{next});").unwrap();
        writeln!(s, "mandatory T{k} in link{k}.r1;").unwrap();
        writeln!(s, "unique link{k}(r1);").unwrap();
        if k % 4 == 3 {
            writeln!(s, "frequency T{next} in link{k}.r2 : 1..2;").unwrap();
        }
    }
    for k in (0..n).step_by(3) {
        writeln!(s, "object S{k};").unwrap();
        writeln!(s, "subtype S{k} of T{k};").unwrap();
    }
    s
}

/// The hospital admission example, with a ternary fact type.
pub const HOSPITAL: &str = "object Patient; object Hospital; value Date: date;
fact PatientIsAdmittedToHospitalAtDateDate (r1: Patient, haspatients: Hospital, r3: Date);
mandatory Hospital in PatientIsAdmittedToHospitalAtDateDate.haspatients;
unique PatientIsAdmittedToHospitalAtDateDate(r1, haspatients, r3);
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_sizes() {
        assert_eq!(chain(1).lines().count(), 3);
        assert!(chain(5).contains("frequency T4 in link3.r2 : 1..2;"));
    }
}
