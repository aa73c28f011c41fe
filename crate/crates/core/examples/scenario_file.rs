//! Scenario files: parsing, validation errors, overrides and hashing.

use rdars::scenario::Scenario;
use rdars::Error;

const TEXT: &str = r#"
seed = 7

[rdars]
elements = 256
connected = 2

[power]
transmit_power_dbm = 5.0
"#;

fn main() -> rdars::Result<()> {
    let s = Scenario::from_toml_str(TEXT)?;
    println!("{}", s.to_canonical_toml());
    println!("hash {}", s.hash());

    let louder = s.with_overrides(&["power.transmit_power_dbm=15"])?;
    println!("after override: hash {}", louder.hash());

    match Scenario::from_toml_str("[rdars]\nelements = 4\nconnected = 9\n") {
        Err(Error::Validation(errors)) => {
            for e in errors {
                println!("rejected: {}: {}", e.path, e.message);
            }
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
