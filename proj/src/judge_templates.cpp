// SPDX-License-Identifier: Apache-2.0
//
// Judge prompt templates, stored verbatim as versioned resources. The
// output-format sections define the canonical response layout the parser
// inverts; do not reflow them.

#include "promptopt/judge.hpp"

namespace promptopt {

namespace {

const std::string kAestheticTemplate = R"(Please evaluate the aesthetics of two images ("Image 1" and "Image 2") using the 6-level judging system described below.

The two images given are independent, and should be evaluated separately and step by step, ensuring that the order in which the images were presented does not affect your judgment.

- Poor (Score: 0): The image lacks balance, composition, and visual appeal. Colors may be overly saturated or dull, causing discomfort to the viewer. Composition is chaotic, distracting, or poorly framed.

- Below Average (Score: 1): The image present minimal aesthetic appeal, even if there are inconsistencies or major flaws in composition, color, lighting, or other aesthetic elements, or make people feel disjointed or unbalanced, lacking a cohesive visual narrative.

- Average (Score: 2): The image exhibits adequate aesthetic quality contributes to the image's visual appeal to some extent but there is room for improvement in terms of creativity or originality or some aspects of the image may feel generic or uninspired.

- Above Average (Score: 3): The image has strong aesthetic quality regardless of whether there are minor imperfections in composition, color, lighting, or other aesthetic elements may still be present but do not significantly detract from the overall aesthetic, or aesthetic choices may be subjective, with some viewers preferring different styles or approaches.

- Very Good (Score: 4): The image is of exceptional aesthetic quality and demonstrates creativity, skill, and mastery of visual elements even if there is slight room for improvement in composition, color, lighting, or other aesthetic elements.

- Excellent (Score: 5): The image is of perfect balance, harmony, and creativity in aesthetics, creating a visually compelling and impactful image.


Please provide a comprehensive explanation of your score.
Note that the score has nothing to do with image input order.

Output format:

Output for Image 1:
Score: <Your Score for Image 1>
Explanation: <detailed judgment of Score for Image 1>

Output for Image 2:
Score: <Your Score for Image 2>
Explanation: <detailed judgment of Score for Image 2>)";

const std::string kAlignmentTemplate = R"(Please evaluate the alignment of two pictures ("Image 1" and "Image 2") to the text ("Text") using the 6-level judging system described below.

The two images given are independent, and should be evaluated separately and step by step, ensuring that the order in which the images were presented does not affect your judgment.

You need to first consider what appears in the image, then whether what is described in the text appears in the image, and finally give a score based on the system.

Judging system:

- No Match (Score: 0): The image does not contain any of the objects or elements mentioned in the text. There is no recognizable connection between the text and the image.

- Poor Match (Score: 1): The image contains one or a few of the objects mentioned in the text, but these are peripheral and do not capture the primary content or relationships described. Quantitative relationships are ignored or inaccurately represented.

- Fair Match (Score: 2): Some of the primary objects mentioned in the text are present in the image, and at least one quantitative relationship or object relationship is correctly depicted. However, several key objects or relationships are missing or inaccurately represented.

- Good Match (Score: 3): The majority of the objects mentioned in the text are present, and many of the described quantitative relationships and object relationships are accurately depicted. Minor details may be missing or slightly altered.

- Excellent Match (Score: 4): Nearly all objects described in the text are accurately represented in the image, including precise quantitative relationships and interactions between objects. Only trivial discrepancies or omissions are present, which do not significantly impact the overall accuracy.

- Perfect Match (Score: 5): The image perfectly matches the text in terms of the presence of all described objects, accurate quantitative relationships, and the exact relationships between objects. Every detail mentioned in the text is present and correctly depicted in the image.

Text: <PROMPT>

Please provide a comprehensive explanation of your score. Note that the score has nothing to do with image input order.

Output format:

Output for Image 1:
Score: <Your Score for Image 1>
Explanation: <detailed judgment of Score for Image 1>

Output for Image 2:
Score: <Your Score for Image 2>
Explanation: <detailed judgment of Score for Image 2>)";

const std::string kPickTemplate = R"(Please evaluate how well these two images ("Image 1" and "Image 2") generated based on the text ("Text") are preferred by humans using the 6-level judging system described below.

The two images given are independent, and should be evaluated separately and step by step, ensuring that the order in which the images were presented does not affect your judgment.

In this system, 'attractiveness' refers to the visual appeal of an image to the human in terms of color, composition, lighting, style, and detail.

Judging system:

- Poor (Score: 0): The image is repulsive or offensive, lacking any attractiveness. It is completely irrelevant to the text information and presents the text in a manner that is unpleasant or unacceptable to the audience.

- Below Average (Score: 1): The image has almost no attractiveness, and the audience is indifferent to it. Its relevance to the text information is low, and the presentation style is not attractive enough, making the audience find it rather dull.

- Average (Score: 2): The image lacks attractiveness, is ordinary and lacks visual highlights, the conveyed text information is not sufficiently clear, and the presentation style is rather ordinary, lacking novelty or appeal.

- Above Average (Score: 3): The image's attractiveness is average, without any particular outstanding features but also not mediocre, conveying the text information and presenting the text in a generally acceptable manner, albeit not particularly outstanding.

- Very Good (Score: 4): The image is highly attractive, with good visual effects, conveying the text information basically, and presenting the text in a way that is appealing to humans, allowing the audience to understand and resonate to some extent.

- Excellent (Score: 5): The image is extremely attractive, with outstanding visual effects, clearly and accurately conveying the text, and presenting the text in a way that resonates deeply with the audience and evokes strong emotional connections.

Text: <PROMPT>

Please provide a comprehensive explanation of your score.

Note that the score has nothing to do with image input order.

Output format:

Output for Image 1:
Score: <Your Score for Image 1>
Explanation: <detailed judgment of Score for Image 1>

Output for Image 2:
Score: <Your Score for Image 2>
Explanation: <detailed judgment of Score for Image 2>)";

const std::string kAestheticJudgmentTemplate = R"(You are a helpful and precise assistant for checking the quality of the answers.

Given the input:

1. Image 1 and Image 2
2. Question: {{question}}
3. Answer A: {{answer_A}}
4. Answer B: {{answer_B}}

Your task is to evaluate the model's predicted answer, based on the context provided by the images and the question. There are two image scores for each answer, and you need to include an evaluation of both outputs ("Output of Image 1" and "Output of Image 2") in each answer. Please provide a comprehensive explanation of your score, noting that your explanation should be based on the facts of the images and not be vague and uninformative.

Consider the following criteria for evaluation:

- Relevance: Does each output in the predicted answer relate to the content of each image?

- Accuracy: Does the prediction in each output accurately reflect the information given in the image without introducing factual inaccuracies?

- Objectivity: For the analysis of the images, do the two predicted outputs in each answer give approximate scores, avoiding any overestimation or underestimation?

- Clarity: Assess the clarity of the predicted answer. Look for issues such as repetition, unclear descriptions, or any grammatical errors that could hinder understanding.

- Completeness: Determine if each predicted output in answer fully covers the scope of the images. Does it leave out critical information or does it include all necessary details?

Output Format:

Output for Answer A:
Score: <an integer score of quality from 1-5>
Explanation: <detailed judgment of prediction for "Output of Image 1" and "Output of Image 2">

Output for Answer B:
Score: <an integer score of quality from 1-5>
Explanation: <detailed judgment of prediction for "Output of Image 1" and "Output of Image 2">)";

const std::string kPickJudgmentTemplate = R"(You are a helpful and precise assistant for checking the quality of the answers.

Given the input:

1. Image 1 and Image 2
2. Prompt: {{prompt}}
3. Question: {{question}}
4. Answer A: {{answer_A}}
5. Answer B: {{answer_B}}

Your task is to evaluate the model's predicted answer, based on the context provided by the images and the question. There are two image scores for each answer, and you need to include an evaluation of both outputs ("Output of Image 1" and "Output of Image 2") in each answer. Please provide a comprehensive explanation of your score, noting that your explanation should be based on the facts of the images and not be vague and uninformative.

Consider the following criteria for evaluation:

- Relevance: Does each outputs in the predicted answer relate to the content of each image?

- Accuracy: Does the prediction in each output accurately reflect the information given in the image without introducing factual inaccuracies?

- Objectivity: For the analysis of the images, do the two predicted outputs in each answer give approximate scores, avoiding any overestimation or underestimation?

- Clarity: Assess the clarity of the predicted answer. Look for issues such as repetition, unclear descriptions, or any grammatical errors that could hinder understanding.

- Completeness: Determine if each predicted output in answer fully covers the scope of the images. Does it leave out critical information or does it include all necessary details?

Output Format:

Output for Answer A:
Score: <an integer score of quality from 1-5>
Explanation: <detailed judgment of prediction for "Output of Image 1" and "Output of Image 2">

Output for Answer B:
Score: <an integer score of quality from 1-5>
Explanation: <detailed judgment of prediction for "Output of Image 1" and "Output of Image 2">)";

}  // namespace

const std::string& template_text(JudgeKind kind) {
    switch (kind) {
        case JudgeKind::aesthetic: return kAestheticTemplate;
        case JudgeKind::alignment: return kAlignmentTemplate;
        case JudgeKind::pick: return kPickTemplate;
        case JudgeKind::aesthetic_judgment: return kAestheticJudgmentTemplate;
        case JudgeKind::pick_judgment: return kPickJudgmentTemplate;
    }
    throw std::invalid_argument("template_text: unknown kind");
}

}  // namespace promptopt
