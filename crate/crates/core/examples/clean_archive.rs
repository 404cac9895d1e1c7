//! A ZIP holding a member nobody knows how to clean, under each of the
//! three unknown-member policies.

use demeta::{clean_zip, CleanPolicy, UnknownMemberAction};

fn main() {
    let data = match std::env::args().nth(1) {
        Some(p) => std::fs::read(p).expect("readable file"),
        None => demeta_fixtures::archive::zip_with_unknown(),
    };
    for action in [UnknownMemberAction::Abort, UnknownMemberAction::Omit, UnknownMemberAction::CopyVerbatim] {
        let policy = CleanPolicy { unknown_member_action: action, ..Default::default() };
        let r = clean_zip(&data, &policy);
        println!("{action:?}: {:?}", r.status);
        for w in &r.warnings {
            println!("  warning: {w}");
        }
        if let Some(out) = &r.output {
            let names = zip::ZipArchive::new(std::io::Cursor::new(out))
                .map(|z| z.file_names().map(String::from).collect::<Vec<_>>())
                .unwrap_or_default();
            println!("  members: {names:?}");
        }
    }

    // nested archives are cleaned member by member
    let nested = demeta_fixtures::archive::zip_fixtures().remove(1);
    let r = clean_zip(&nested.bytes, &CleanPolicy::default());
    for e in &r.removed {
        println!("{}: {} @ {}", e.key, e.value, e.location);
    }
}
