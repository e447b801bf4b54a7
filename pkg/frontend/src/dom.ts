// Small DOM helpers shared by the wizard steps.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

// English left-to-right next to Arabic right-to-left; the Arabic span is
// explicitly marked so mixed lines render correctly in either page
// direction.
export function bilingual(nameEn: string, nameAr: string): HTMLElement {
  const wrapper = el("span", { class: "bilingual" });
  wrapper.append(el("span", { class: "name-en", lang: "en", dir: "ltr" }, [nameEn]));
  if (nameAr) {
    wrapper.append(" ");
    wrapper.append(el("span", { class: "name-ar", lang: "ar", dir: "rtl" }, [nameAr]));
  }
  return wrapper;
}

export function errorBox(message: string): HTMLElement {
  return el("div", { class: "error-box", role: "alert" }, [message]);
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}
