use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");

    let config = cbindgen::Config::from_file(crate_dir.join("cbindgen.toml"))
        .expect("cbindgen.toml parses");
    let bindings = cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(config)
        .generate()
        .expect("header generation");

    let header = crate_dir.join("include/msfeat.h");
    // Rewrite only on change so an untouched checkout stays byte-identical.
    let mut buf = Vec::new();
    bindings.write(&mut buf);
    if std::fs::read(&header).ok().as_deref() != Some(buf.as_slice()) {
        std::fs::create_dir_all(header.parent().unwrap()).unwrap();
        std::fs::write(&header, &buf).unwrap();
    }
}
