"""Build the desk-scale fixture set under fixtures/.

Outputs (all deterministic, seeded):

* corpus.jsonl            200 theorem documents (20 targets + distractors)
* problems.jsonl          20 training problems, one per target theorem
* queries_heldout.jsonl   20 unseen paraphrase questions for evaluation
* qrels_heldout.txt       relevance judgments for the held-out queries
* mock_script.jsonl       scripted LLM responses that drive tree search
* pipeline.ini            config wired to the files above

The 20 "families" pair a problem-vocabulary question with a formal
theorem whose wording barely overlaps it, so lexical retrieval struggles
on questions while the mined training data teaches the mapping. Each
held-out question shares wording with its family's training question
plus one or two theorem terms (enough for BM25 to surface the target
somewhere in its top 20, leaving the reranker room to improve).
"""

from __future__ import annotations

import json
import random
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# One family: the target theorem, its summary, the training problem, a
# held-out paraphrase, and every scripted LLM response the search needs.
FAMILIES = [
    {
        "slug": "pigeonhole",
        "title": "Pigeonhole Principle",
        "theorem": "Let n items be placed into m containers. If n is greater than m, then at least one container holds two or more of the items.",
        "summary": "Putting more items into containers than there are containers forces some container to receive at least two items.",
        "question": "A warehouse stores 65 identical boxes on shelves, and each shelf can hold at most 8 boxes. What is the minimum number of shelves needed to store every box?",
        "gold": "9",
        "held_question": "A depot must store 90 identical boxes in storage containers, and each container holds at most 7 boxes. What is the minimum number of containers needed to store every box?",
        "held_gold": "13",
        "steps": [
            "Step 1: Each shelf can hold at most 8 boxes, so we divide the 65 boxes by the shelf capacity.",
            "Step 2: Dividing gives 65 / 8 = 8.125, and a shelf count must be a whole number, so we round up.",
        ],
        "final_step": "Step 3: Rounding up gives 9 shelves, so the minimum number of shelves is $\\boxed{9}$.",
        "crs": "Dividing the 65 boxes by the capacity 8 gives 8.125, so 8 shelves are not enough and we round up. The answer is: $\\boxed{9}$.",
        "qg": "Pigeonhole Principle. If n items are placed into m containers with n greater than m, then at least one container holds two or more items.",
        "llmq": "Distributing more objects than available containers so that some container must hold several objects.",
        "lexical": [
            "pigeonhole principle items containers",
            "n items placed into m containers at least one holds two",
            "container holds two or more items principle",
        ],
    },
    {
        "slug": "arith_series",
        "title": "Sum of Arithmetic Progression",
        "theorem": "The sum of the first n terms of an arithmetic progression with initial term a and common difference d equals n(2a + (n-1)d)/2.",
        "summary": "To add the first n terms of an arithmetic progression, average the first and last terms and multiply by the number of terms.",
        "question": "Tiles are laid in rows so that the first row has 4 tiles and every later row has 3 more tiles than the row before it. How many tiles are needed for the first 10 rows altogether?",
        "gold": "175",
        "held_question": "Seats are arranged in rows so that the first row has 6 seats and every later row grows by a common difference of 3 seats. How many seats are needed for the first 8 rows altogether?",
        "held_gold": "132",
        "steps": [
            "Step 1: The row sizes form the sequence 4, 7, 10, and so on, each row adding 3 tiles.",
            "Step 2: The tenth row has 4 + 9 * 3 = 31 tiles, so we need the total of rows sized 4 through 31.",
        ],
        "final_step": "Step 3: The total is 10 * (4 + 31) / 2 = 175 tiles, so the answer is $\\boxed{175}$.",
        "crs": "The tenth row has 4 + 9 * 3 = 31 tiles, and adding the ten rows gives 10 * (4 + 31) / 2 = 175. The answer is: $\\boxed{175}$.",
        "qg": "Sum of Arithmetic Progression. The sum of the first n terms of an arithmetic progression with initial term a and common difference d equals n(2a + (n-1)d)/2.",
        "llmq": "Total of a sequence of row counts that increase by the same amount each row.",
        "lexical": [
            "sum of arithmetic progression first n terms",
            "arithmetic progression common difference sum formula",
            "n(2a + (n-1)d)/2 progression total",
        ],
    },
    {
        "slug": "geom_series",
        "title": "Sum of a Geometric Series",
        "theorem": "Let a geometric series have leading entry a and ratio r with r not equal to 1. Then the total of its n leading entries equals a(r^n - 1)/(r - 1).",
        "summary": "Adding the n leading entries of a geometric series with ratio r gives a times (r to the n minus 1) over (r minus 1).",
        "question": "A colony of bacteria doubles every hour, starting from 5 cells. Adding the counts recorded at each of the first 4 hours, what total count do we get?",
        "gold": "75",
        "held_question": "A fund doubles every year with a ratio of 2, starting from 3 dollars. Adding the amounts recorded over the 5 leading years, what total do we get?",
        "held_gold": "93",
        "steps": [
            "Step 1: The hourly counts are 5, 10, 20, 40, each hour doubling the one before.",
            "Step 2: We need the total 5 + 10 + 20 + 40 over the 4 recorded hours.",
        ],
        "final_step": "Step 3: The total is 5 * (2^4 - 1) / (2 - 1) = 75, so the answer is $\\boxed{75}$.",
        "crs": "The counts 5, 10, 20, 40 add to 5 * (2^4 - 1) / (2 - 1) = 75. The answer is: $\\boxed{75}$.",
        "qg": "Sum of a Geometric Series. Let a geometric series have leading entry a and ratio r with r not equal to 1; the total of its n leading entries equals a(r^n - 1)/(r - 1).",
        "llmq": "Total of repeatedly doubled quantities recorded over several periods.",
        "lexical": [
            "geometric series ratio total of leading entries",
            "geometric series a(r^n - 1)/(r - 1) formula",
            "total of a geometric series entries",
        ],
    },
    {
        "slug": "pythagoras",
        "title": "Pythagorean Theorem",
        "theorem": "In a right triangle, the square of the hypotenuse equals the sum of the squares of the other two sides.",
        "summary": "For a right triangle, squaring the longest side gives the same number as squaring the two shorter sides and adding them.",
        "question": "A ladder leans against a wall so that its foot is 9 meters from the wall and its top is 12 meters up the wall. How long is the ladder?",
        "gold": "15",
        "held_question": "A ramp rises 8 meters over a horizontal run of 6 meters. Measured as the hypotenuse of the right triangle, how long is the ramp surface?",
        "held_gold": "10",
        "steps": [
            "Step 1: The wall, the ground, and the ladder form a right triangle with legs 9 and 12 meters.",
            "Step 2: The ladder length squared equals 9^2 + 12^2 = 81 + 144 = 225.",
        ],
        "final_step": "Step 3: Taking the square root of 225 gives 15 meters, so the ladder is $\\boxed{15}$ meters long.",
        "crs": "The legs are 9 and 12, so the ladder satisfies L^2 = 81 + 144 = 225 and L = 15. The answer is: $\\boxed{15}$.",
        "qg": "Pythagorean Theorem. In a right triangle the square of the hypotenuse equals the sum of the squares of the other two sides.",
        "llmq": "Finding the slanted side of a right triangle from the two perpendicular distances.",
        "lexical": [
            "pythagorean theorem right triangle hypotenuse",
            "square of hypotenuse sum of squares of sides",
            "right triangle side lengths squared relation",
        ],
    },
    {
        "slug": "quadratic",
        "title": "Quadratic Formula",
        "theorem": "The solutions of the equation ax^2 + bx + c = 0 with a not zero are x = (-b plus or minus the square root of b^2 - 4ac) divided by 2a; the quantity b^2 - 4ac is called the discriminant.",
        "summary": "Any quadratic equation is solved by negating b, adding or subtracting the square root of the discriminant, and dividing by twice a.",
        "question": "Find the larger root of the equation x^2 - 5x + 6 = 0.",
        "gold": "3",
        "held_question": "Using the discriminant, find the larger root of the equation x^2 - 7x + 12 = 0.",
        "held_gold": "4",
        "steps": [
            "Step 1: For x^2 - 5x + 6 = 0 we have a = 1, b = -5, c = 6.",
            "Step 2: The discriminant is (-5)^2 - 4 * 1 * 6 = 25 - 24 = 1.",
        ],
        "final_step": "Step 3: The roots are (5 + 1)/2 = 3 and (5 - 1)/2 = 2, so the larger root is $\\boxed{3}$.",
        "crs": "With a = 1, b = -5, c = 6 the discriminant is 1, giving roots 3 and 2. The answer is: $\\boxed{3}$.",
        "qg": "Quadratic Formula. The solutions of ax^2 + bx + c = 0 are x = (-b plus or minus the square root of the discriminant b^2 - 4ac) divided by 2a.",
        "llmq": "Solving a quadratic equation for its roots using its coefficients.",
        "lexical": [
            "quadratic formula solutions ax^2 + bx + c",
            "discriminant b^2 - 4ac roots of quadratic equation",
            "solve quadratic equation square root of discriminant",
        ],
    },
    {
        "slug": "combinations",
        "title": "Binomial Coefficient Counts Subsets",
        "theorem": "The number of ways to choose k elements from a set of n distinct elements equals n! / (k!(n-k)!).",
        "summary": "Choosing k things out of n distinct things can be done in n factorial over k factorial times (n minus k) factorial ways.",
        "question": "A committee of 2 people is to be formed from 6 candidates. How many different committees are possible?",
        "gold": "15",
        "held_question": "From 7 distinct candidates, in how many ways can we choose 2 elements to form a committee?",
        "held_gold": "21",
        "steps": [
            "Step 1: Order does not matter in a committee, so we count unordered pairs of candidates.",
            "Step 2: The count is 6! / (2! * 4!) = (6 * 5) / 2.",
        ],
        "final_step": "Step 3: That gives 30 / 2 = 15 committees, so the answer is $\\boxed{15}$.",
        "crs": "We count unordered pairs: 6!/(2!4!) = 15. The answer is: $\\boxed{15}$.",
        "qg": "Binomial Coefficient Counts Subsets. The number of ways to choose k elements from n distinct elements equals n!/(k!(n-k)!).",
        "llmq": "Counting how many unordered groups of a fixed size can be formed from a pool of people.",
        "lexical": [
            "choose k elements from n distinct elements",
            "binomial coefficient n!/(k!(n-k)!) subsets",
            "number of ways to choose committee combinations",
        ],
    },
    {
        "slug": "bayes",
        "title": "Bayes' Theorem",
        "theorem": "For events A and B with positive probability, the conditional probability satisfies P(A|B) = P(B|A) P(A) / P(B).",
        "summary": "The conditional probability of A given B equals the probability of B given A times the prior of A, divided by the probability of B.",
        "question": "Urn I holds 1 red ball out of 2 balls; urn II holds 1 red ball out of 4 balls. An urn is picked at random and a red ball is drawn. The chance it came from urn I is m/n in lowest terms. What is m+n?",
        "gold": "5",
        "held_question": "Bowl A holds 2 red marbles out of 3; bowl B holds 1 red marble out of 3. A bowl is picked at random and a red marble is drawn. The conditional probability it was bowl A is m/n in lowest terms. What is m+n?",
        "held_gold": "5",
        "steps": [
            "Step 1: Drawing red from urn I has chance 1/2 and from urn II chance 1/4, each urn picked with chance 1/2.",
            "Step 2: The overall chance of red is (1/2)(1/2) + (1/2)(1/4) = 3/8, and red-from-I contributes 1/4.",
        ],
        "final_step": "Step 3: The chance it was urn I is (1/4) / (3/8) = 2/3, so m+n = 2+3 = $\\boxed{5}$.",
        "crs": "The chance of red is 3/8 and urn I contributes 1/4, so the answer fraction is 2/3 and m+n = 5. The answer is: $\\boxed{5}$.",
        "qg": "Bayes' Theorem. For events A and B with positive probability, P(A|B) = P(B|A) P(A) / P(B).",
        "llmq": "Updating the chance a particular source produced an observed outcome.",
        "lexical": [
            "bayes theorem conditional probability events",
            "P(A|B) = P(B|A) P(A) / P(B)",
            "posterior probability from prior and likelihood",
        ],
    },
    {
        "slug": "expectation",
        "title": "Linearity of Expectation",
        "theorem": "For any random variables X and Y, the expected value satisfies E[X + Y] = E[X] + E[Y], regardless of whether X and Y are independent.",
        "summary": "The expected value of a sum of random variables is always the sum of their expected values, even when they depend on each other.",
        "question": "Two fair six-sided dice are rolled. What is the expected value of the sum of the two dice?",
        "gold": "7",
        "held_question": "Three fair coins are tossed and each head scores 1 point. Using the expected value of a sum of random variables, the expected total score is m/n in lowest terms. What is m+n?",
        "held_gold": "5",
        "steps": [
            "Step 1: Each die alone has expected value (1+2+3+4+5+6)/6 = 3.5.",
            "Step 2: The expectation of the sum is the sum of the two expectations.",
        ],
        "final_step": "Step 3: The expected sum is 3.5 + 3.5 = 7, so the answer is $\\boxed{7}$.",
        "crs": "Each die has expectation 3.5 and expectations add, giving 7. The answer is: $\\boxed{7}$.",
        "qg": "Linearity of Expectation. For any random variables X and Y, E[X + Y] = E[X] + E[Y] regardless of independence.",
        "llmq": "Expected total of several random scores added together.",
        "lexical": [
            "linearity of expectation E[X+Y] = E[X] + E[Y]",
            "expected value of sum of random variables",
            "expectation adds regardless of independence",
        ],
    },
    {
        "slug": "fermat",
        "title": "Fermat's Little Theorem",
        "theorem": "If p is a prime number and a is an integer not divisible by p, then a^(p-1) is congruent to 1 modulo p.",
        "summary": "Raising a number coprime to a prime p to the power p minus 1 always leaves remainder 1 when divided by p.",
        "question": "What is the remainder when 2^10 is divided by 11?",
        "gold": "1",
        "held_question": "Working modulo the prime 7, what is the remainder when 3^6 is divided by 7?",
        "held_gold": "1",
        "steps": [
            "Step 1: 11 is prime and 2 is not divisible by 11, so powers of 2 repeat modulo 11.",
            "Step 2: The exponent 10 equals 11 - 1, the special exponent for the modulus 11.",
        ],
        "final_step": "Step 3: Therefore 2^10 leaves remainder 1 when divided by 11, so the answer is $\\boxed{1}$.",
        "crs": "Since 11 is prime and 10 = 11 - 1, the power 2^10 leaves remainder 1 modulo 11. The answer is: $\\boxed{1}$.",
        "qg": "Fermat's Little Theorem. If p is a prime and a is not divisible by p, then a^(p-1) is congruent to 1 modulo p.",
        "llmq": "Remainder of a large power of an integer when divided by a prime number.",
        "lexical": [
            "fermat little theorem prime a^(p-1) congruent 1",
            "power of integer modulo prime remainder",
            "a^(p-1) mod p equals 1 prime",
        ],
    },
    {
        "slug": "euclid_gcd",
        "title": "Euclidean Algorithm",
        "theorem": "For integers a and b with b not zero, gcd(a, b) = gcd(b, a mod b); repeating this step terminates in the greatest common divisor.",
        "summary": "To find the greatest common divisor of two integers, keep replacing the larger by its remainder on division by the smaller until nothing remains.",
        "question": "Find the greatest common divisor of 48 and 18.",
        "gold": "6",
        "held_question": "Using remainders, compute the greatest common divisor of 84 and 30.",
        "held_gold": "6",
        "steps": [
            "Step 1: Divide 48 by 18: remainder 12, so the problem reduces to 18 and 12.",
            "Step 2: Divide 18 by 12: remainder 6, so the problem reduces to 12 and 6.",
        ],
        "final_step": "Step 3: 12 divided by 6 leaves no remainder, so the greatest common divisor is $\\boxed{6}$.",
        "crs": "48 mod 18 = 12, 18 mod 12 = 6, 12 mod 6 = 0, so the divisor is 6. The answer is: $\\boxed{6}$.",
        "qg": "Euclidean Algorithm. For integers a and b with b nonzero, gcd(a, b) = gcd(b, a mod b), and repeating terminates in the greatest common divisor.",
        "llmq": "Reducing a pair of integers by repeated division with remainder to find their shared divisor.",
        "lexical": [
            "euclidean algorithm gcd(a, b) = gcd(b, a mod b)",
            "greatest common divisor by repeated remainder",
            "gcd of two integers algorithm",
        ],
    },
    {
        "slug": "inclusion_exclusion",
        "title": "Inclusion-Exclusion for Two Sets",
        "theorem": "For finite sets A and B, the size of the union satisfies |A union B| = |A| + |B| - |A intersection B|.",
        "summary": "To count the union of two overlapping sets, add their sizes and subtract the size of the overlap once.",
        "question": "In a class of 30 students, 18 play soccer, 15 play chess, and 8 play both. How many students play at least one of the two games?",
        "gold": "25",
        "held_question": "Among 40 readers, 22 read fantasy, 19 read mystery, and 9 read both genres. Counting the union of the two sets of readers, how many read at least one genre?",
        "held_gold": "32",
        "steps": [
            "Step 1: Adding the soccer and chess counts gives 18 + 15 = 33, which counts the overlap twice.",
            "Step 2: The 8 students who play both were counted twice, so subtract them once.",
        ],
        "final_step": "Step 3: The union has 33 - 8 = 25 students, so the answer is $\\boxed{25}$.",
        "crs": "Adding 18 and 15 double-counts the 8 who play both, so 33 - 8 = 25. The answer is: $\\boxed{25}$.",
        "qg": "Inclusion-Exclusion for Two Sets. For finite sets A and B, |A union B| = |A| + |B| - |A intersection B|.",
        "llmq": "Counting members covered by at least one of two overlapping groups.",
        "lexical": [
            "inclusion exclusion two sets union size",
            "|A union B| = |A| + |B| - |A intersection B|",
            "count union of overlapping finite sets",
        ],
    },
    {
        "slug": "triangle_ineq",
        "title": "Triangle Inequality for Real Numbers",
        "theorem": "For all real numbers a and b, the absolute value of a + b is at most the absolute value of a plus the absolute value of b.",
        "summary": "The absolute value of a sum of two real numbers never exceeds the sum of their absolute values.",
        "question": "What is the largest possible value of |x + y| when |x| = 3 and |y| = 4?",
        "gold": "7",
        "held_question": "Given |u| = 5 and |v| = 2, what is the largest possible absolute value of the sum u + v?",
        "held_gold": "7",
        "steps": [
            "Step 1: The size of a sum is bounded by the sum of the sizes, so |x + y| is at most 3 + 4.",
            "Step 2: Choosing x = 3 and y = 4 with the same sign attains the bound.",
        ],
        "final_step": "Step 3: The largest possible value is 3 + 4 = 7, so the answer is $\\boxed{7}$.",
        "crs": "|x + y| is at most 3 + 4 = 7 and equality holds for same signs. The answer is: $\\boxed{7}$.",
        "qg": "Triangle Inequality for Real Numbers. For all real a and b, the absolute value of a + b is at most the absolute value of a plus the absolute value of b.",
        "llmq": "Largest possible size of a sum of two quantities with fixed sizes.",
        "lexical": [
            "triangle inequality absolute value of sum",
            "absolute value |a + b| at most |a| + |b|",
            "bound on absolute value of sum of real numbers",
        ],
    },
    {
        "slug": "am_gm",
        "title": "Arithmetic Mean-Geometric Mean Inequality",
        "theorem": "For nonnegative real numbers x and y, the arithmetic mean (x + y)/2 is at least the geometric mean, the square root of xy, with equality exactly when x equals y.",
        "summary": "The average of two nonnegative numbers is at least the square root of their product, and the two agree only when the numbers are equal.",
        "question": "Two positive numbers have product 36. What is the smallest possible value of their sum?",
        "gold": "12",
        "held_question": "Two nonnegative numbers have product 25. Using the relation between the arithmetic mean and the geometric mean, what is the smallest possible value of their sum?",
        "held_gold": "10",
        "steps": [
            "Step 1: For positive numbers with fixed product, the sum is minimized when the numbers are equal.",
            "Step 2: Equal numbers with product 36 are both 6.",
        ],
        "final_step": "Step 3: The smallest sum is 6 + 6 = 12, so the answer is $\\boxed{12}$.",
        "crs": "The sum is minimized at equal values 6 and 6, giving 12. The answer is: $\\boxed{12}$.",
        "qg": "Arithmetic Mean-Geometric Mean Inequality. For nonnegative x and y, (x + y)/2 is at least the square root of xy with equality when x = y.",
        "llmq": "Smallest possible sum of two quantities whose product is fixed.",
        "lexical": [
            "arithmetic mean geometric mean inequality",
            "(x + y)/2 at least square root of xy",
            "nonnegative numbers arithmetic mean geometric mean equality",
        ],
    },
    {
        "slug": "law_cosines",
        "title": "Law of Cosines",
        "theorem": "In any triangle with sides a, b, c and angle C opposite side c, the side lengths satisfy c^2 = a^2 + b^2 - 2ab cos(C).",
        "summary": "The square of one side of a triangle equals the sum of the squares of the other two sides minus twice their product times the cosine of the enclosed angle.",
        "question": "Two sides of a triangle have lengths 5 and 8 and enclose an angle of 60 degrees. What is the square of the length of the third side?",
        "gold": "49",
        "held_question": "Two sides of lengths 7 and 3 enclose an angle of 60 degrees. Using the cosine of the enclosed angle, what is the square of the opposite side?",
        "held_gold": "37",
        "steps": [
            "Step 1: The enclosed angle is 60 degrees and cos(60) = 1/2.",
            "Step 2: The third side squared is 5^2 + 8^2 - 2 * 5 * 8 * (1/2) = 25 + 64 - 40.",
        ],
        "final_step": "Step 3: That evaluates to 49, so the square of the third side is $\\boxed{49}$.",
        "crs": "With cos(60) = 1/2 the third side squared is 25 + 64 - 40 = 49. The answer is: $\\boxed{49}$.",
        "qg": "Law of Cosines. In any triangle with sides a, b, c and angle C opposite c, c^2 = a^2 + b^2 - 2ab cos(C).",
        "llmq": "Finding the remaining side of a triangle from two sides and the angle between them.",
        "lexical": [
            "law of cosines c^2 = a^2 + b^2 - 2ab cos(C)",
            "triangle third side from two sides and angle",
            "cosine rule side opposite angle",
        ],
    },
    {
        "slug": "power_rule",
        "title": "Power Rule for Differentiation",
        "theorem": "For any real exponent n, the derivative of x^n with respect to x is n times x^(n-1).",
        "summary": "Differentiating x to a power multiplies by the exponent and lowers the exponent by one.",
        "question": "What is the slope of the curve y = x^3 at the point where x = 2?",
        "gold": "12",
        "held_question": "Using the derivative of a power of x, what is the slope of the curve y = x^4 at the point where x = 1?",
        "held_gold": "4",
        "steps": [
            "Step 1: The slope of y = x^3 is given by its derivative, 3x^2.",
            "Step 2: Evaluating the derivative at x = 2 gives 3 * 4.",
        ],
        "final_step": "Step 3: The slope is 3 * 4 = 12, so the answer is $\\boxed{12}$.",
        "crs": "The derivative is 3x^2, which at x = 2 equals 12. The answer is: $\\boxed{12}$.",
        "qg": "Power Rule for Differentiation. For any real exponent n, the derivative of x^n is n x^(n-1).",
        "llmq": "Slope of a polynomial curve at a specific point.",
        "lexical": [
            "power rule derivative of x^n",
            "derivative n x^(n-1) differentiation",
            "slope of curve from derivative power",
        ],
    },
    {
        "slug": "circle_area",
        "title": "Area of a Circle",
        "theorem": "A circle of radius r encloses an area equal to pi times r squared.",
        "summary": "The area inside a circle is pi multiplied by the square of its radius.",
        "question": "A circular garden has radius 3 meters. Its area equals k pi square meters for what integer k?",
        "gold": "9",
        "held_question": "A round plate has radius 5 centimeters. Using the area of a circle, the enclosed area equals k pi for what integer k?",
        "held_gold": "25",
        "steps": [
            "Step 1: The garden is a circle of radius 3, so its area is pi times 3 squared.",
            "Step 2: Squaring the radius gives 9.",
        ],
        "final_step": "Step 3: The area is 9 pi, so k = $\\boxed{9}$.",
        "crs": "The area is pi * 3^2 = 9 pi, so k = 9. The answer is: $\\boxed{9}$.",
        "qg": "Area of a Circle. A circle of radius r encloses an area equal to pi r^2.",
        "llmq": "Area enclosed by a round region of known radius.",
        "lexical": [
            "area of a circle pi r squared",
            "circle radius r encloses area",
            "pi r^2 area formula circle",
        ],
    },
    {
        "slug": "independent_events",
        "title": "Probability of Independent Events",
        "theorem": "If events A and B are independent, then the probability that both occur satisfies P(A and B) = P(A) P(B).",
        "summary": "For independent events, the chance that both happen is the product of their individual chances.",
        "question": "A fair coin is flipped and a fair six-sided die is rolled. The probability of getting heads and a six equals 1/n for what integer n?",
        "gold": "12",
        "held_question": "Two independent spinners land on red with probabilities 1/3 and 1/4. The probability that both land on red equals 1/n for what integer n?",
        "held_gold": "12",
        "steps": [
            "Step 1: The coin and the die do not influence each other, so the chances multiply.",
            "Step 2: The chance of heads is 1/2 and the chance of a six is 1/6.",
        ],
        "final_step": "Step 3: The joint chance is (1/2)(1/6) = 1/12, so n = $\\boxed{12}$.",
        "crs": "The chances multiply: (1/2)(1/6) = 1/12, so n = 12. The answer is: $\\boxed{12}$.",
        "qg": "Probability of Independent Events. If A and B are independent, then P(A and B) = P(A) P(B).",
        "llmq": "Chance that two unrelated random outcomes both happen.",
        "lexical": [
            "independent events probability product P(A)P(B)",
            "probability both events occur independence",
            "multiply probabilities independent events",
        ],
    },
    {
        "slug": "permutations",
        "title": "Count of Permutations",
        "theorem": "The number of distinct orderings of n distinct objects equals n factorial, that is n times (n-1) times ... times 1.",
        "summary": "n different objects can be arranged in a row in n factorial different orders.",
        "question": "In how many different orders can 4 students line up for a photo?",
        "gold": "24",
        "held_question": "How many distinct orderings of 5 different books are possible on a shelf, counting with the factorial?",
        "held_gold": "120",
        "steps": [
            "Step 1: The first position can be any of the 4 students, the next any of the remaining 3, and so on.",
            "Step 2: The count is the product 4 * 3 * 2 * 1.",
        ],
        "final_step": "Step 3: The product is 24, so the answer is $\\boxed{24}$.",
        "crs": "The orderings number 4 * 3 * 2 * 1 = 24. The answer is: $\\boxed{24}$.",
        "qg": "Count of Permutations. The number of distinct orderings of n distinct objects equals n factorial.",
        "llmq": "Number of ways to arrange a group of different items in a row.",
        "lexical": [
            "number of orderings n distinct objects factorial",
            "permutations count n!",
            "arrange objects in a row factorial ways",
        ],
    },
    {
        "slug": "division_algorithm",
        "title": "Division Algorithm for Integers",
        "theorem": "For integers a and b with b positive, there exist unique integers q and r such that a = bq + r and r is at least 0 and less than b, the quotient and remainder.",
        "summary": "Any integer divided by a positive integer leaves a unique quotient and a unique remainder smaller than the divisor.",
        "question": "When 100 eggs are packed into cartons of 12, how many eggs are left over?",
        "gold": "4",
        "held_question": "Packing 75 apples into crates of 9, the quotient and remainder satisfy the division identity. How many apples remain unpacked?",
        "held_gold": "3",
        "steps": [
            "Step 1: Dividing 100 by 12 gives 8 full cartons, since 8 * 12 = 96.",
            "Step 2: The eggs not in full cartons number 100 - 96.",
        ],
        "final_step": "Step 3: That leaves 4 eggs over, so the answer is $\\boxed{4}$.",
        "crs": "100 = 12 * 8 + 4, so 4 eggs are left over. The answer is: $\\boxed{4}$.",
        "qg": "Division Algorithm for Integers. For integers a and b with b positive, a = bq + r with a unique quotient q and remainder r between 0 and b.",
        "llmq": "What remains after packing items into equal-sized full groups.",
        "lexical": [
            "division algorithm quotient and remainder",
            "a = bq + r unique remainder less than b",
            "integer division remainder theorem",
        ],
    },
    {
        "slug": "euler_polyhedron",
        "title": "Euler's Polyhedron Formula",
        "theorem": "For any convex polyhedron with V vertices, E edges, and F faces, the counts satisfy V - E + F = 2.",
        "summary": "On a convex polyhedron, vertices minus edges plus faces always equals two.",
        "question": "A convex polyhedron has 8 vertices and 12 edges. How many faces does it have?",
        "gold": "6",
        "held_question": "A convex polyhedron has 6 vertices and 9 edges. By the relation among vertices, edges, and faces, how many faces does it have?",
        "held_gold": "5",
        "steps": [
            "Step 1: The vertex, edge, and face counts of a convex polyhedron satisfy one linear relation.",
            "Step 2: Substituting V = 8 and E = 12 gives 8 - 12 + F = 2.",
        ],
        "final_step": "Step 3: Solving gives F = 6, so the answer is $\\boxed{6}$.",
        "crs": "From 8 - 12 + F = 2 we get F = 6. The answer is: $\\boxed{6}$.",
        "qg": "Euler's Polyhedron Formula. For any convex polyhedron with V vertices, E edges, and F faces, V - E + F = 2.",
        "llmq": "Relation connecting the counts of corners, edges, and faces of a solid.",
        "lexical": [
            "euler polyhedron formula V - E + F = 2",
            "convex polyhedron vertices edges faces relation",
            "faces of polyhedron from vertices and edges",
        ],
    },
]

# Distractor material: real short math facts written in the same
# theorem-ese as the targets (If/then, For any, Let, equals, at least),
# so that generic glue words carry low IDF and never bind targets to
# one another. Bridge terms are sprinkled into a controlled number of
# distractors so held-out questions do not trivially rank their target
# first.
_SUBJECTS = [
    ("Square of an Even Integer", "Let n be an integer. If n is even, then n^2 is even."),
    ("Consecutive Integers Sum to Odd", "For any integer n, the sum of n and its successor n + 1 is odd."),
    ("Product of Odd Integers", "If a and b are odd integers, then the product a b is odd."),
    ("Divisibility Transitivity Theorem", "For all integers a, b, and c, if a divides b and b divides c, then a divides c."),
    ("Digit Sum Congruence Theorem", "Let n be a positive integer. Then the sum of the digits of n is congruent to n modulo 9."),
    ("Alternate Interior Angles", "If two lines in the plane are parallel, then any transversal makes equal alternate interior angles."),
    ("Interior Angles of a Triangle", "The interior angles of any triangle have measures that add to 180 degrees."),
    ("Segments Minimize Distance", "For any two points in the plane, the segment joining them is the shortest path between them."),
    ("Interior Angles of a Polygon", "If a polygon has n sides, then the sum of its interior angles equals (n - 2) times 180 degrees."),
    ("Squares are Nonnegative", "For all real numbers x, the square x^2 is at least 0."),
    ("Rationals are Dense", "If x and y are real numbers with x less than y, then there exists a rational number between x and y."),
    ("Polynomial Remainder Theorem", "Let f be a polynomial. Then the remainder of f(x) upon division by x - c equals f(c)."),
    ("Integer Root Theorem", "If a monic polynomial with integer coefficients has an integer root, then that root divides the constant term."),
    ("Difference of Squares", "For any real numbers a and b, the expression a^2 - b^2 equals the product (a + b)(a - b)."),
    ("Sum of Cubes Factorization", "For any real numbers a and b, the expression a^3 + b^3 equals (a + b)(a^2 - a b + b^2)."),
    ("Vieta's Relations for Quadratics", "If r and s are the roots of a monic quadratic, then the coefficient of x equals -(r + s) and the constant term equals r s."),
    ("Monotone Convergence Theorem", "If a sequence of real numbers is bounded and monotone, then it converges to a real limit."),
    ("Terms of a Convergent Series", "If a series of positive terms converges, then its terms tend to 0."),
    ("Roots of Unity Count", "For any positive integer n, the equation z^n = 1 has exactly n distinct complex solutions."),
    ("Differentiable Implies Continuous", "If a function is differentiable at a point, then it is continuous at that point."),
    ("Counting Subsets", "Let A be a finite set with n elements. Then the number of subsets of A equals 2^n."),
    ("Equal Cardinality Bijection", "If each of two finite sets has the same number of elements, then there is a one-to-one correspondence between them."),
    ("Complement Counting", "For any property, the number of outcomes with the property equals the total count minus the number of outcomes without it."),
    ("Union Bound for Probabilities", "For any events A and B, the probability of their union is at most the sum of their probabilities."),
    ("Variance of an Independent Sum", "If X and Y are independent random variables, then the variance of X + Y equals the sum of the variances."),
    ("Congruences Respect Addition", "Let a, b, and m be integers with m positive. If a is congruent to b modulo m, then a + c is congruent to b + c modulo m for every integer c."),
    ("Prime Divisor Theorem", "If p is a prime and p divides a product a b, then p divides a or p divides b."),
    ("Product Equals GCD Times LCM", "For any positive integers a and b, the product a b equals the product of their greatest common divisor and least common multiple."),
    ("Unique Factorization Theorem", "Every integer greater than 1 factors into primes uniquely up to the order of the factors."),
    ("Similar Triangles Theorem", "If two triangles have equal corresponding angles, then their corresponding sides are proportional."),
    ("Base Angles of an Isosceles Triangle", "If a triangle has two equal sides, then the angles opposite those sides are equal."),
    ("Semicircle Angle Theorem", "If an angle is inscribed in a semicircle, then it is a right angle."),
    ("Diagonals of a Parallelogram", "If a quadrilateral is a parallelogram, then its diagonals bisect each other."),
    ("Midpoint Theorem", "For any segment with endpoints P and Q, the midpoint has coordinates equal to the averages of the coordinates of P and Q."),
    ("Absolute Value Bounds", "For any real number x, the absolute value of x is at least x and at least -x."),
    ("Mean Straddles a Value", "If a finite list of numbers has mean m, then at least one value is at least m and at least one value is at most m."),
    ("Median Splits a List", "For any finite list, at least half of the values are at least the median and at least half are at most the median."),
    ("Round-Robin Game Count", "If n distinct teams each play every other team exactly once, then the number of games equals n(n - 1)/2."),
    ("Sum of the First Odd Numbers", "Let n be a positive integer. Then the sum of the first n odd numbers equals n^2."),
    ("Square Roots of a Positive Number", "If a number x satisfies x^2 = a with a positive, then x equals the positive or the negative square root of a."),
    ("Root of a Product Bound", "For any nonnegative real numbers x and y, the square root of the product x y is at most the maximum of x and y."),
    ("Termwise Sum Comparison", "If the terms of one sequence are at most the corresponding terms of another, then the sum of the first is at most the sum of the second."),
    ("Pythagorean Identity Theorem", "For any angle t, the squares of the sine and the cosine of t add to 1."),
    ("Circumference of a Circle", "If a circle has radius r, then its circumference equals 2 pi r."),
    ("Divisors are Bounded", "Let a and b be positive integers. If a divides b, then a is at most b."),
    ("Arithmetic Mean of a List", "For any finite list of numbers, the arithmetic mean lies between the smallest and the largest value."),
    ("Slope as a Ratio", "For any nonvertical line in the plane, the slope has a geometric meaning as the ratio of rise to run."),
    ("Progression of Partial Sums", "If every term of a progression is positive, then its partial sums form an increasing progression."),
    ("Ratio Test Bound", "If the ratio r of successive entries of a series satisfies r less than 1, then the series converges."),
    ("Sector of a Circle", "If a circle of radius r has a sector with central angle t, then the sector has area t r^2 / 2."),
    ("Remainder Shrinks", "If r is the remainder of a upon division by b, then r is less than b."),
    ("Complement Rule for Probability", "For any event A with probability p, the complementary event has probability 1 - p."),
    ("Certain and Impossible Events", "For any probability measure, the certain event has probability 1 and the impossible event has probability 0."),
    ("Probability of No Successes", "If an experiment with success probability p is repeated n times independently, then the probability of no successes equals (1 - p)^n."),
    ("Bezout Identity", "For any integers a and b, there exist integers x and y with a x + b y equal to the greatest common divisor of a and b."),
    ("Exponential Beats Polynomials", "For the base e power function, e^x grows faster than any polynomial in x."),
    ("Natural Logarithm of e", "The natural logarithm of the number e equals 1, and e equals the limit of (1 + 1/n)^n."),
    ("Binary Strings Count", "The number of distinct binary strings of length n equals 2^n."),
    ("Distinct Remainders", "If a and b leave distinct remainders upon division by m, then a and b are distinct integers."),
    ("Bisection Algorithm Convergence", "The bisection algorithm halves the interval at every step, so the algorithm converges to a root."),
    ("Sorting by Exchange", "Any finite list can be put in order by an algorithm that repeatedly exchanges adjacent values."),
    ("Even Perfect Numbers", "If 2^p - 1 is a prime, then 2^(p-1) times (2^p - 1) is a perfect number."),
    ("Monotonicity of Probability", "For any events A and B with A contained in B, the probability of A is at most the probability of B."),
    ("Handshake Lemma", "In any graph with E edges, the sum of the degrees of the vertices equals 2 E."),
]

_TOPIC_WORDS = [
    "integer", "sequence", "function", "polygon", "fraction", "angle",
    "polynomial", "matrix", "graph", "series", "modulus", "interval",
    "lattice", "vector", "inequality", "partition", "residue", "digit",
    "circle", "square",
]

# per-family bridge terms planted into a handful of distractors
_BRIDGES = {
    "pigeonhole": "containers",
    "arith_series": "common difference",
    "geom_series": "ratio",
    "pythagoras": "hypotenuse",
    "quadratic": "discriminant",
    "combinations": "choose elements",
    "bayes": "conditional probability",
    "expectation": "expected value",
    "fermat": "modulo a prime",
    "euclid_gcd": "greatest common divisor",
    "inclusion_exclusion": "union of sets",
    "triangle_ineq": "absolute value",
    "am_gm": "geometric mean",
    "law_cosines": "cosine",
    "power_rule": "derivative",
    "circle_area": "radius",
    "independent_events": "independent",
    "permutations": "orderings",
    "division_algorithm": "remainder",
    "euler_polyhedron": "polyhedron",
}

_BRIDGES_PER_FAMILY = 4


def build_corpus(rng: random.Random) -> list[dict]:
    """200 documents: 20 targets placed among 180 generated distractors."""
    distractors: list[dict] = []
    serial = 0
    bridge_plan: list[str] = []
    for fam in FAMILIES:
        bridge_plan.extend([fam["slug"]] * _BRIDGES_PER_FAMILY)
    while len(distractors) < 180:
        base_title, base_text = _SUBJECTS[serial % len(_SUBJECTS)]
        variant = serial // len(_SUBJECTS) + 1
        if variant == 1:
            title, text = base_title, base_text
        else:
            word_a = _TOPIC_WORDS[rng.randrange(len(_TOPIC_WORDS))]
            word_b = _TOPIC_WORDS[rng.randrange(len(_TOPIC_WORDS))]
            title = f"{base_title} ({word_a.title()} Form {variant})"
            text = f"{base_text} The statement is recorded here for any {word_a} arising in a {word_b} setting."
        if bridge_plan:
            slug = bridge_plan.pop()
            bridge = _BRIDGES[slug]
            text += (
                f" A related remark concerns the {bridge} appearing in such problems:"
                f" any bound stated through the {bridge} transfers to this setting."
            )
        distractors.append({"title": title, "text": text})
        serial += 1
    rng.shuffle(distractors)

    docs: list[dict] = []
    target_positions = sorted(rng.sample(range(200), len(FAMILIES)))
    position_to_family = dict(zip(target_positions, FAMILIES))
    distractor_iter = iter(distractors)
    for pos in range(200):
        doc_id = f"pw_{pos + 1:04d}"
        fam = position_to_family.get(pos)
        if fam is not None:
            fam["doc_id"] = doc_id
            docs.append({"id": doc_id, "title": fam["title"], "text": fam["theorem"]})
        else:
            dis = next(distractor_iter)
            docs.append({"id": doc_id, "title": dis["title"], "text": dis["text"]})
    return docs


def build_mock_script() -> list[dict]:
    """Scripted responses keyed by contiguous prompt substrings.

    Order matters: family-specific entries come first, generic
    fallbacks last. The keys exploit label/value junctions that are
    unique per template (e.g. "<question>\\nResponse:" only occurs in
    the step-generation prompt).

    Reflection acceptance must depend on the (problem, theorem) pair,
    not the theorem alone, or cross-retrieved targets would be accepted
    and mislabel the mined data. The reflection prompt makes that pair
    a contiguous substring: the partial solution's last line is a
    problem-specific scripted step that directly abuts
    "\\nRetrieved Document: <theorem>". Acceptance entries key on that
    junction (or, for an empty partial, on the full
    question/solution/document block); everything else falls through
    to the generic reject, so cross-retrieved theorems land in the
    hard-negative ledger."""
    entries: list[dict] = []
    accept_response = (
        "Relevant: True\nReason: The theorem directly addresses the subproblem "
        "in the intermediate solution."
    )
    for fam in FAMILIES:
        q = fam["question"]
        theorem_prefix = fam["theorem"][:60]
        summary_line = fam["title"] + " - " + fam["summary"]
        entries.append(
            {
                "match": q + "\nResponse:",
                "responses": fam["steps"] + [fam["final_step"]],
            }
        )
        entries.append({"match": "Context: " + q, "responses": [fam["crs"]]})
        entries.append({"match": q + "\nIntermediate Solution:", "responses": [fam["qg"]]})
        # reflection accept: empty partial (query generated at the root)
        entries.append(
            {
                "match": (
                    "Question: " + q + "\nIntermediate solution: \n"
                    "Retrieved Document: " + theorem_prefix
                ),
                "responses": [accept_response],
            }
        )
        # reflection accept: partial ending in one of this family's steps
        for last_line in fam["steps"] + [summary_line]:
            entries.append(
                {
                    "match": last_line + "\nRetrieved Document: " + theorem_prefix,
                    "responses": [accept_response],
                }
            )
        entries.append(
            {
                "match": "(in latex): " + theorem_prefix,
                "responses": [summary_line],
            }
        )
        entries.append(
            {
                "match": q + "\nPartial solution:",
                "responses": [
                    "Preconditions: The quantities in the question satisfy the hypotheses of the theorem.\n"
                    "Generated Query: " + fam["llmq"]
                ],
            }
        )
        entries.append(
            {
                "match": "Theorem statement: " + theorem_prefix,
                "responses": ["\n".join("Query: " + lex for lex in fam["lexical"])],
            }
        )
    # generic fallbacks, least specific last
    entries.append(
        {
            "match": "denoted as Retrieved Document",
            "responses": [
                "Relevant: False\nReason: The retrieved statement does not address the current question."
            ],
        }
    )
    entries.append(
        {
            "match": "convert it to a simpler natural language",
            "responses": ["A standard mathematical fact, restated in plain language."],
        }
    )
    entries.append(
        {
            "match": "Theorem statement: ",
            "responses": ["Query: general mathematical statement lookup"],
        }
    )
    entries.append({"match": "", "responses": ["I am not able to continue this solution."]})
    return entries


def _verify(docs: list[dict]) -> None:
    """Retrieval sanity checks the rest of the pipeline depends on.

    Each family's QG query must rank its own theorem first with no other
    target in the top 5 (the mock accepts per-theorem, so cross-target
    retrieval would mislabel training data); every scripted lexical
    candidate must pass the top-20 round-trip filter; and each held-out
    question must surface its target somewhere in the BM25 top 20 so a
    reranker has headroom to improve the ordering.
    """
    from treemine.corpus import Corpus, TheoremDoc
    from treemine.retrieval import build_bm25, bm25_search

    corpus = Corpus(docs=[TheoremDoc(d["id"], d["title"], d["text"]) for d in docs])
    index = build_bm25(corpus)
    target_ids = {fam["doc_id"] for fam in FAMILIES}
    problems_after_qg = []
    cross_total = 0
    for fam in FAMILIES:
        hits = bm25_search(index, fam["qg"], 5)
        ids = [h.doc_id for h in hits]
        if not ids or ids[0] != fam["doc_id"]:
            raise AssertionError(f"{fam['slug']}: QG query does not rank its target first: {ids}")
        cross_total += sum(1 for i in ids[1:] if i in target_ids)
        for candidate in fam["lexical"]:
            hits20 = [h.doc_id for h in bm25_search(index, candidate, 20)]
            if fam["doc_id"] not in hits20:
                raise AssertionError(
                    f"{fam['slug']}: lexical candidate fails round-trip: {candidate!r}"
                )
        held_hits = [h.doc_id for h in bm25_search(index, fam["held_question"], 20)]
        if fam["doc_id"] not in held_hits:
            raise AssertionError(f"{fam['slug']}: held-out question misses target in top-20")
        problems_after_qg.append((fam["slug"], held_hits.index(fam["doc_id"]) + 1))
    print("held-out BM25 rank of target:", problems_after_qg)
    print("cross-family targets inside QG top-5 (become ledger rejects):", cross_total)


def main() -> None:
    rng = random.Random(20240817)
    FIXTURES.mkdir(parents=True, exist_ok=True)

    docs = build_corpus(rng)
    with open(FIXTURES / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(json.dumps(doc, ensure_ascii=False) + "\n")

    with open(FIXTURES / "problems.jsonl", "w", encoding="utf-8") as fh:
        for i, fam in enumerate(FAMILIES, start=1):
            fh.write(
                json.dumps(
                    {
                        "id": f"prob_{i:02d}",
                        "question": fam["question"],
                        "gold_answer": fam["gold"],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    with open(FIXTURES / "queries_heldout.jsonl", "w", encoding="utf-8") as fh:
        for i, fam in enumerate(FAMILIES, start=1):
            fh.write(
                json.dumps(
                    {"id": f"held_{i:02d}", "text": fam["held_question"]},
                    ensure_ascii=False,
                )
                + "\n"
            )

    with open(FIXTURES / "qrels_heldout.txt", "w", encoding="utf-8") as fh:
        for i, fam in enumerate(FAMILIES, start=1):
            fh.write(f"held_{i:02d} 0 {fam['doc_id']} 1\n")

    with open(FIXTURES / "mock_script.jsonl", "w", encoding="utf-8") as fh:
        for entry in build_mock_script():
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")

    _verify(docs)

    (FIXTURES / "pipeline.ini").write_text(
        """[paths]
corpus = fixtures/corpus.jsonl
problems = fixtures/problems.jsonl
output_dir = out

[mcts]
rollouts = 16
max_depth = 6
exploration_c = 2.0
rt_top_k = 5
ost_children = 2
qg_children = 1

[decoding]
temperature = 0.8
top_k = 40
top_p = 0.95
max_tokens = 512

[backend]
kind = mock
mock_script = fixtures/mock_script.jsonl

[retriever]
kind = bm25
k1 = 1.2
b = 0.75

[synthesis]
negatives = 12
lexical_candidates = 3
types = cot,llmq,question,lexical

[train]
group_size = 12
temperature = 0.01
learning_rate = 0.05
epochs = 8
batch_size = 32
hash_dim = 16384
emb_dim = 128

[run]
seed = 7
workers = 1
""",
        encoding="utf-8",
    )
    print(f"fixtures written to {FIXTURES}")
    targets = {fam["slug"]: fam["doc_id"] for fam in FAMILIES}
    print("target doc ids:", targets)


if __name__ == "__main__":
    main()
