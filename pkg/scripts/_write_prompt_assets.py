"""One-shot helper that writes the prompt template assets as JSON files."""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "treemine" / "assets" / "prompts"
OUT.mkdir(parents=True, exist_ok=True)

templates = {}

templates["ost"] = {
    "template_id": "ost",
    "text": (
        "A chat between a curious user and an AI assistant. The assistant gives "
        "step-by-step solutions to the user's questions. At the final step, a "
        "conclusive answer is given in the format of \"The answer is: \\boxed{ANSWER}.\", "
        "where ANSWER should be a numeric answer.\n\n"
        "{few_shots}\n\n"
        "Question: {question}\n"
        "Response: Let's think step by step.{partial_solution}"
    ),
    "few_shots": [
        "Question: Gracie and Joe are choosing numbers on the complex plane. Joe chooses the point $1+2i$. Gracie chooses $-1+i$. How far apart are Gracie and Joe's points?\n"
        "Response: Let's think step by step.\n"
        "Step 1: Distance formula is $\\sqrt{(x_2-x_1)^2+(y_2-y_1)^2}$.\n"
        "Step 2: Joe's point $(1,2)$, Gracie's $(-1,1)$.\n"
        "Step 3: Distance $\\sqrt{((-1)-(1))^2+((1)-(2))^2}=\\sqrt{4+1}=\\sqrt{5}$.\n"
        "Step 4: Points are $\\boxed{\\sqrt{5}}$ units apart.\n"
        "Step 5: The answer is: $\\sqrt{5}$.",
        "Question: What is the sum of all positive integer values of $n$ for which $\\frac{n+6}{n}$ is an integer?\n"
        "Response: Let's think step by step.\n"
        "Step 1: $n+6$ divisible by $n$.\n"
        "Step 2: $n$ must be factor of 6.\n"
        "Step 3: Factors of 6 are 1, 2, 3, 6. Sum is $1+2+3+6=\\boxed{12}$.\n"
        "Step 4: The answer is: 12.",
        "Question: Abigail, Beatrice, and Carson sell eggs in cartons of 12. Abigail has 37, Beatrice 49, Carson 14 eggs. How many eggs remain after selling all cartons?\n"
        "Response: Let's think step by step.\n"
        "Step 1: Total eggs $37+49+14=100$.\n"
        "Step 2: Divide by 12: $100\\div12=8$ cartons, remainder 4.\n"
        "Step 3: Remaining eggs $\\boxed{4}$.\n"
        "Step 4: The answer is: 4.",
        "Question: Circle $T$ has center $T(-2,6)$, reflected across $y$-axis, translated 8 units down. Find coordinates of image center.\n"
        "Response: Let's think step by step.\n"
        "Step 1: Reflect across $y$-axis: $(-(-2),6)=(2,6)$.\n"
        "Step 2: Translate down 8 units: $(2,6-8)=(2,-2)$.\n"
        "Step 3: Image coordinates $\\boxed{(2,-2)}$.\n"
        "Step 4: The answer is: $(2,-2)$.",
    ],
}

templates["crs"] = {
    "template_id": "crs",
    "text": (
        "You are given context about a mathematical question. Your job is to generate "
        "the next steps of the solution and complete the solution. In the end of your "
        "response, a final answer is given in the format of \"$\\boxed{ANSWER}$\", where "
        "ANSWER should be a numeric result or a math expression.\n\n"
        "{few_shots}\n\n"
        "Context: {question}{partial_solution}\n"
        "Next steps:"
    ),
    "few_shots": [
        "Context: Gracie and Joe are choosing numbers on the complex plane. Joe chooses the point $1+2i$. Gracie chooses $-1+i$. How far apart are Gracie and Joe's points? The distance between two points $(x_1,y_1)$ and $(x_2,y_2)$ in the complex plane is given by $\\sqrt{(x_2-x_1)^2+(y_2-y_1)^2}$. Joe's point is $(1,2)$ and Gracie's point is $(-1,1)$.\n"
        "Next steps: The distance is $\\sqrt{((-1)-(1))^2+((1)-(2))^2}=\\sqrt{4+1}=\\sqrt{5}$. Therefore, Gracie and Joe's points are $\\boxed{\\sqrt{5}}$ units apart.",
        "Context: What is the sum of all positive integer values of $n$ for which $\\frac{n+6}{n}$ is an integer?\n"
        "Next steps: We want $\\frac{n+6}{n}$ to be integer, thus $n+6$ divisible by $n$. Since $n$ positive, $n$ must factor 6. Factors: 1, 2, 3, 6. Sum is $1+2+3+6=\\boxed{12}$.",
        "Context: Abigail, Beatrice, and Carson sell eggs in cartons of 12. Abigail has 37 eggs, Beatrice has 49, Carson has 14. First, total eggs: $37+49+14=100$. Divide by 12: $100 \\div 12 = 8$ remainder $4$.\n"
        "Next steps: Eggs remaining: $\\boxed{4}$. The answer is: 4.",
        "Context: Circle $T$ has center $T(-2,6)$, reflected across $y$-axis, translated 8 units down. Reflecting across $y$-axis negates $x$-coordinate.\n"
        "Next steps: Reflection gives $(2,6)$. Translating down 8 units: $(2,6-8)=(2,-2)$. Therefore, coordinates are $\\boxed{(2,-2)}$.",
    ],
}

templates["query_gen"] = {
    "template_id": "query_gen",
    "text": (
        "You are given a mathematical question and an intermediate solution. What are "
        "the mathematical concepts, theorems, formulas that would be useful for solving "
        "this question. Please provide the theorem name, followed by the theorem "
        "statement, followed by the preconditions in the theorem, and why the "
        "preconditions are satisfied in the question we have. Also mention which "
        "specific subjects in math this theorem corresponds to. List out as many number "
        "of theorems that are highly relevant to this question. Do not output the final "
        "solution. Do not generate theorems which are already present in the "
        "intermediate solution.\n\n"
        "{few_shots}\n\n"
        "Question: {question}\n"
        "Intermediate Solution: {partial_solution}"
    ),
    "few_shots": [
        "Theorem: Polynomial Division Algorithm\n"
        "Theorem Statement: For any two polynomials P(z) (dividend) and D(z) (divisor), with $deg(P(z)) \\geq deg(D(z))$, there exist unique polynomials Q(z) (quotient) and R(z) (remainder) such that: $P(z)=D(z)Q(z)+R(z)$.\n"
        "Question: Find quotient of $\\frac{3z^4 -4z^3 +5z^2 -11z +2}{2+3z}$.\n"
        "Intermediate Solution: Apply polynomial long division.\n"
        "Query: (Polynomial Division) $P(z)=D(z)Q(z)+R(z)$ if $\\deg(P) \\geq \\deg(D)$.\n"
        "Preconditions Met: (1) $D(z)=3z+2\\neq 0$, (2) $\\deg(P)=4>\\deg(D)=1$.\n"
        "Subject: Algebra.",
        "Theorem: Principle of Inclusion-Exclusion\n"
        "Theorem Statement: For any two finite sets A and B, the size of their union is given by: $|A \\cup B| = |A| + |B| - |A \\cap B|$.\n"
        "Question: Probability of palindrome (letters/digits) in plates, simplified as $\\frac{m}{n}$, find $m+n$.\n"
        "Intermediate Solution: Compute separately, combine using inclusion-exclusion.\n"
        "Query: (Inclusion-Exclusion) $|A \\cup B|=|A|+|B|-|A \\cap B|$.\n"
        "Preconditions Met: (1) Sets finite (letters/digits), potential overlap possible.\n"
        "Subject: Combinatorics.",
        "Theorem: Basic Multiplication Principle\n"
        "Theorem Statement: If there are m ways to do something and n ways to do another thing, then there are m*n to do both things.\n"
        "Question: Pages written/year if 3-page letters to 2 friends twice weekly?\n"
        "Intermediate Solution: Pages/week calculation, then yearly total.\n"
        "Query: (Multiplication Principle) Actions with $m$ and $n$ ways yield $m\\times n$ combined ways.\n"
        "Preconditions Met: Counts defined clearly; independent actions.\n"
        "Subject: Arithmetic.",
    ],
}

templates["self_reflection"] = {
    "template_id": "self_reflection",
    "text": (
        "You are given a mathematical question, an intermediate solution and a "
        "mathematical theorem which was retrieved denoted as Retrieved Document. First, "
        "please judge whether the mathematical theorem is relevant with the question and "
        "the intermediate solution, and put it in the relevant field. If the provided "
        "content is irrelevant to the question and the context, explain the reason in "
        "the relevant reason field. The format will be as follows:\n"
        "Question: [question]\n"
        "Intermediate solution: [intermediate solution]\n"
        "Retrieved Document: [theorem]\n"
        "Relevant: [relevance label]\n"
        "Reason: [reason].\n\n"
        "{few_shots}\n\n"
        "Question: {question}\n"
        "Intermediate solution: {partial_solution}\n"
        "Retrieved Document: {theorem}\n"
        "Relevant:"
    ),
    "few_shots": [
        "Question: Let $f: \\mathbb{R} \\to \\mathbb{R}$ be continuous, with $f(0)=0$ and $f(x+y)=f(x)+f(y)+xy$. Find degree of $f$.\n"
        "Intermediate solution: Define $g(x)=f(x)-\\frac{x^2}{2}$.\n"
        "Retrieved Document: Cauchy's equation $f(x+y)=f(x)+f(y)$, continuous solution linear: $f(x)=cx$.\n"
        "Relevant: True\n"
        "Reason: Defining $g(x)$ transforms into Cauchy's form, yielding $g(x)=cx$ and thus $f(x)=\\frac{x^2}{2}+cx$ degree 2.",
        "Question: Let $f: \\mathbb{R} \\to \\mathbb{R}$ differentiable with $f'(x)=f(x)+x$. Find $f(x)$.\n"
        "Intermediate solution: Requires solving differential equation directly.\n"
        "Retrieved Document: Rolle's Theorem guarantees $f'(c)=0$ under certain continuity/differentiability conditions.\n"
        "Relevant: False\n"
        "Reason: There is no direct application of Rolle's Theorem to the differential equation provided, as the theorem does not help in finding the solution to the equation $f'(x) = f(x) + x$.",
        "Question: Battery lifetime exponential mean 10 hours. Probability battery lasts at least 15 hours?\n"
        "Intermediate solution: Use exponential distribution's CDF.\n"
        "Retrieved Document: Markov's Inequality provides upper bound $P(X \\geq a) \\leq \\frac{E[X]}{a}$.\n"
        "Relevant: False\n"
        "Reason: Markov's gives bounds, not exact probabilities; exact CDF calculation is necessary here.",
    ],
}

templates["self_summarization"] = {
    "template_id": "self_summarization",
    "text": (
        "Given the statement of a mathematical theorem in a structured latex format, "
        "convert it to a simpler natural language format by removing latex notations.\n\n"
        "{few_shots}\n\n"
        "Input ProofWiki Theorem (in latex): {theorem}\n"
        "Generated Natural language theorem:"
    ),
    "few_shots": [
        "Input ProofWiki Theorem (in latex): <Latex Section>: Quadratic Irrational is Root of Quadratic Equation\n"
        "<Tags>: Algebra, Quadratic Equations, Quadratic Irrationals\n"
        "<begin theorem> Let $x$ be a quadratic irrational. Then $x$ is a solution to a quadratic equation with rational coefficients.\n"
        "Generated Natural language theorem: Quadratic Irrational is Root of Quadratic Equation - A quadratic irrational number is always the root of some quadratic equation with rational coefficients.",
    ],
}

templates["llm_query"] = {
    "template_id": "llm_query",
    "text": (
        "Given a math question, its partial solution (may be empty), and a retrieved "
        "theorem, do the following: Identify the preconditions of the theorem and "
        "explain why they hold in the given question. Using these preconditions, "
        "generate a general retrieval query that captures the key mathematical idea "
        "needed in the partial solution. The query should be a single sentence.\n\n"
        "{few_shots}\n\n"
        "Question: {question}\n"
        "Partial solution: {partial_solution}\n"
        "Theorem: {theorem}"
    ),
    "few_shots": [
        "Question: A warehouse needs to store 65 identical boxes using a set of identical shelves, each of which can hold up to 8 boxes. What is the minimum number of shelves required to store all the boxes?\n"
        "Partial solution: To determine the minimum number of shelves required, we divide the total number of boxes by the capacity of each shelf. Since the number of shelves must be a whole number, we round up to 9 shelves.\n"
        "Theorem: If $n$ items are put into $m$ containers, with $n > m$, then at least one container must contain more than one item.\n"
        "Preconditions: (1) There are more items than containers. (2) The items are distributed into containers.\n"
        "Why Preconditions are Satisfied: (1) The warehouse has 65 boxes (items) and needs to distribute them among shelves (containers), where each shelf can hold up to 8 boxes. (2) Since 65 is greater than 8, multiple boxes must be placed on each shelf to store all of them.\n"
        "Generated Query: Minimizing the number of boxes needed to store a given number of objects with fixed capacity constraints.",
    ],
}

templates["lexical_query"] = {
    "template_id": "lexical_query",
    "text": (
        "You are given the statement of a mathematical theorem. Write search queries "
        "that a student could type to find this exact theorem in a searchable "
        "collection. Reuse the key terms of the theorem statement so that a keyword "
        "search engine can match it. Write one query per line, each starting with "
        "\"Query:\".\n\n"
        "{few_shots}\n\n"
        "Theorem statement: {theorem}\n"
        "Queries:"
    ),
    "few_shots": [
        "Theorem statement: Let $x$ be a quadratic irrational. Then $x$ is a solution to a quadratic equation with rational coefficients.\n"
        "Queries:\n"
        "Query: quadratic irrational root of quadratic equation rational coefficients\n"
        "Query: quadratic irrational is a solution to which equation\n"
        "Query: equation with rational coefficients solved by a quadratic irrational",
    ],
}

for name, payload in templates.items():
    path = OUT / f"{name}.json"
    path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print("wrote", path)
