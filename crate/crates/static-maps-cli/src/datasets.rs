//! The three demo datasets, embedded from the repository's `data/` TSVs:
//! element symbol -> average atomic mass, DNA codon -> amino acid letter
//! (stop = '*'), and stock ticker -> price.

pub const ELEMENTS_TSV: &str = include_str!("../../../data/elements.tsv");
pub const CODONS_TSV: &str = include_str!("../../../data/codons.tsv");
pub const STOCKS_TSV: &str = include_str!("../../../data/stocks.tsv");

fn rows(tsv: &'static str) -> impl Iterator<Item = (&'static str, &'static str)> {
    tsv.lines().filter(|l| !l.is_empty()).map(|l| l.split_once('\t').expect("malformed dataset"))
}

pub fn elements() -> Vec<(String, f64)> {
    rows(ELEMENTS_TSV).map(|(k, v)| (k.to_string(), v.parse().expect("mass"))).collect()
}

pub fn codons() -> Vec<(String, char)> {
    rows(CODONS_TSV).map(|(k, v)| (k.to_string(), v.chars().next().expect("amino"))).collect()
}

pub fn stocks() -> Vec<(String, f64)> {
    rows(STOCKS_TSV).map(|(k, v)| (k.to_string(), v.parse().expect("price"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_datasets_have_expected_shape() {
        let e = elements();
        assert_eq!(e.len(), 118);
        assert_eq!(e[0], ("H".to_string(), 1.008));
        assert!(e.iter().any(|(k, v)| k == "He" && *v == 4.002602));

        let c = codons();
        assert_eq!(c.len(), 64);
        assert!(c.iter().any(|(k, v)| k == "ATG" && *v == 'M'));
        assert_eq!(c.iter().filter(|(_, v)| *v == '*').count(), 3);

        let s = stocks();
        assert!((450..=550).contains(&s.len()), "stocks count {}", s.len());
        assert!(s.iter().any(|(k, _)| k == "AAPL"));
    }
}
