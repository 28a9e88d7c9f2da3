use qrsid::catalog::Catalog;

const SHIPPED: &str = include_str!("../../../catalog/identities.json");

#[test]
fn shipped_catalog_matches_builtin() {
    let builtin = Catalog::builtin();
    assert_eq!(
        SHIPPED.trim_end(),
        builtin.to_json(),
        "regenerate with `qrsid catalog export --out catalog/identities.json`"
    );
    assert_eq!(Catalog::from_json(SHIPPED).unwrap(), builtin);
}
