fn main() -> std::process::ExitCode {
    pairon_cli::main_with(|args, out, err| pairon_cli::lmg::run(args, out, err))
}
