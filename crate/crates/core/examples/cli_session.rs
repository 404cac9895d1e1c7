//! Drives the command-line front end in-process over a scratch directory:
//! list, check, clean, check again.

fn run(args: &[&str]) -> i32 {
    let mut argv = vec!["demeta"];
    argv.extend(args);
    println!("$ {}", argv.join(" "));
    let code = demeta::cli::run(argv, &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit {code}\n");
    code
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_current_dir(dir.path()).unwrap();
    std::fs::create_dir("in").unwrap();
    for f in demeta_fixtures::corpus().into_iter().step_by(6) {
        std::fs::write(format!("in/{}", f.name), f.bytes).unwrap();
    }
    run(&["list", "-r", "in"]);
    run(&["check", "-r", "in"]);
    run(&["clean", "-r", "--output-dir", "out", "--normalize-times", "in"]);
    let code = run(&["check", "-r", "out"]);
    assert_eq!(code, 0);
}
