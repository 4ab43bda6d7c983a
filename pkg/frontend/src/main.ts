import "./style.css";
import { ApiClient } from "./api";
import { createRegistrarPage } from "./registrar";
import { createVerifierPage } from "./verifier";

const DEFAULT_API = "http://127.0.0.1:8431";

function apiBaseUrl(): string {
  const params = new URLSearchParams(window.location.search);
  return (
    params.get("api") ?? localStorage.getItem("certchain.api") ?? DEFAULT_API
  );
}

function mount(): void {
  const root = document.getElementById("app")!;
  const api = new ApiClient(apiBaseUrl());

  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "Certificate Registry";
  header.appendChild(title);

  const apiLabel = document.createElement("p");
  apiLabel.className = "api-base";
  apiLabel.textContent = `Service: ${api.baseUrl}`;
  header.appendChild(apiLabel);

  const nav = document.createElement("nav");
  const verifierTab = document.createElement("button");
  verifierTab.textContent = "Verifier";
  const registrarTab = document.createElement("button");
  registrarTab.textContent = "Registrar";
  nav.append(verifierTab, registrarTab);
  header.appendChild(nav);

  const verifier = createVerifierPage(api);
  const registrar = createRegistrarPage(api);
  registrar.hidden = true;

  verifierTab.className = "tab active";
  registrarTab.className = "tab";
  verifierTab.addEventListener("click", () => {
    verifier.hidden = false;
    registrar.hidden = true;
    verifierTab.classList.add("active");
    registrarTab.classList.remove("active");
  });
  registrarTab.addEventListener("click", () => {
    verifier.hidden = true;
    registrar.hidden = false;
    registrarTab.classList.add("active");
    verifierTab.classList.remove("active");
  });

  root.replaceChildren(header, verifier, registrar);
}

mount();
